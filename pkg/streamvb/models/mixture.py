"""Mixture of axis-aligned Gaussians with Dirichlet weights

Blocks: ``weights`` (Dirichlet-k) and one NormalGamma block per component
and dimension, named ``component_{j}_dim_{d}``. Each observation has a
categorical latent z over the k components.
"""

import logging
import math
from typing import Any, Dict, List, Mapping

import numpy as np
from scipy.special import logsumexp
from sklearn.cluster import kmeans_plusplus

from ..errors import InvalidParameterError, SupportError
from ..expfam import NORMAL_GAMMA, NaturalParams, dirichlet
from ..expfam.families import LOG_2PI
from ..rng import STREAM_INIT, keyed_rng
from .base import LocalParams, Likelihood, ModelSpec, Params, as_observations
from .gaussian import DEFAULT_PRIOR, student_t_logpdf

logger = logging.getLogger(__name__)

WEIGHTS = "weights"


def component_block(j: int, d: int) -> str:
    return f"component_{j}_dim_{d}"


def kmeans_pp_centres(X: np.ndarray, k: int, seed: int) -> np.ndarray:
    """k-means++ seeding; batches with fewer than k rows reuse their centres cyclically"""
    n = X.shape[0]
    centres, _ = kmeans_plusplus(X, n_clusters=min(k, n), random_state=seed)
    return centres[np.arange(k) % len(centres)]


class GaussianMixtureLikelihood(Likelihood):
    tag = "gaussian_mixture"

    def __init__(self, k: int, dims: int):
        self.k = k
        self.dims = dims

    @classmethod
    def make_model(cls, k: int = 2, dims: int = 1, **prior: float) -> ModelSpec:
        return make_mixture_model(k, dims, **prior)

    def check_data(self, model, data):
        X = np.asarray(as_observations(data), dtype=float)
        if X.ndim <= 1:
            X = X.reshape(-1, 1)
        if X.shape[1] != self.dims:
            raise SupportError(f"mixture expects {self.dims}-dimensional rows, got {X.shape[1]}")
        if not np.all(np.isfinite(X)):
            raise SupportError("observations must be finite")
        return X

    def _component_log_densities(self, posterior: Params, X: np.ndarray) -> np.ndarray:
        """E_q[ln pi_j + ln N(x_i | mu_j, tau_j)] as an (n, k) matrix"""
        weights = posterior[WEIGHTS]
        out = np.tile(weights.family.mean_params(weights.eta), (X.shape[0], 1))
        for j in range(self.k):
            for d in range(self.dims):
                q = posterior[component_block(j, d)]
                m = q.family.mean_params(q.eta)
                x = X[:, d]
                out[:, j] += m[0] * x - 0.5 * m[1] + 0.5 * m[2] - 0.5 * m[3] * x * x
        return out - 0.5 * self.dims * LOG_2PI

    def update_locals(self, model, posterior, X):
        log_r = self._component_log_densities(posterior, X)
        log_r -= logsumexp(log_r, axis=1, keepdims=True)
        return LocalParams(np.exp(log_r))

    def exchangeable(self, start: Params) -> bool:
        """True when every component has the same starting parameters"""
        for d in range(self.dims):
            first = start[component_block(0, d)]
            if any(not start[component_block(j, d)].allclose(first, atol=0.0) for j in range(1, self.k)):
                return False
        return bool(np.all(start[WEIGHTS].eta == start[WEIGHTS].eta[0]))

    def initial_locals(self, model, start, X, seed):
        if not self.exchangeable(start) or X.shape[0] == 0:
            return self.update_locals(model, start, X)
        init_seed = int(keyed_rng(seed, X.shape[0], STREAM_INIT).integers(2**31 - 1))
        centres = kmeans_pp_centres(X, self.k, init_seed)
        nearest = np.argmin([np.sum((X - c) ** 2, axis=1) for c in centres], axis=0)
        logger.debug(f"Seeded {self.k} components from k-means++ centres")
        return LocalParams(np.eye(self.k)[nearest])

    def block_stats(self, model, block, posterior, local, X):
        r = local.responsibilities
        if block == WEIGHTS:
            return r.sum(axis=0)
        j, d = self._parse_block(block)
        x = X[:, d]
        w = r[:, j]
        return np.array([np.dot(w, x), -0.5 * w.sum(), 0.5 * w.sum(), -0.5 * np.dot(w, x * x)])

    @staticmethod
    def _parse_block(block: str):
        _, j, _, d = block.split("_")
        return int(j), int(d)

    def expected_log_likelihood(self, model, posterior, local, X):
        if X.shape[0] == 0:
            return 0.0
        return float(np.sum(local.responsibilities * self._component_log_densities(posterior, X)))

    def log_likelihood(self, model, draw: Mapping[str, Any], X):
        log_w = np.log(draw[WEIGHTS])
        terms = np.tile(log_w, (X.shape[0], 1))
        for j in range(self.k):
            for d in range(self.dims):
                mu, tau = draw[component_block(j, d)]
                terms[:, j] += 0.5 * (math.log(tau) - LOG_2PI) - 0.5 * tau * (X[:, d] - mu) ** 2
        return logsumexp(terms, axis=1)

    def log_predictive(self, model, posterior, X):
        alpha = posterior[WEIGHTS].eta + 1.0
        terms = np.tile(np.log(alpha / alpha.sum()), (X.shape[0], 1))
        for j in range(self.k):
            for d in range(self.dims):
                terms[:, j] += student_t_logpdf(X[:, d], posterior[component_block(j, d)])
        return logsumexp(terms, axis=1)

    def summary(self, model, posterior: Params) -> Dict[str, float]:
        alpha = posterior[WEIGHTS].eta + 1.0
        out: Dict[str, float] = {}
        for j in range(self.k):
            out[f"weight_{j}"] = float(alpha[j] / alpha.sum())
            for d in range(self.dims):
                out[f"mean_{j}_{d}"] = posterior[component_block(j, d)].standard()["mu0"]
        return out


def make_mixture_model(k: int, dims: int = 1, weight_concentration: float = 1.0, **prior: float) -> ModelSpec:
    """Dirichlet weights plus k * dims NormalGamma component blocks"""
    if k < 2:
        raise InvalidParameterError(f"a mixture needs at least 2 components, got {k}", "k")
    if dims < 1:
        raise InvalidParameterError(f"dims must be at least 1, got {dims}", "dims")
    component_prior = NaturalParams.from_standard(NORMAL_GAMMA, **{**DEFAULT_PRIOR, **prior})
    weights_family = dirichlet(k)
    blocks: List = [(WEIGHTS, weights_family)]
    priors = {WEIGHTS: NaturalParams.from_standard(weights_family, alpha=np.full(k, weight_concentration))}
    for j in range(k):
        for d in range(dims):
            blocks.append((component_block(j, d), NORMAL_GAMMA))
            priors[component_block(j, d)] = component_prior
    return ModelSpec(
        name="mixture",
        blocks=tuple(blocks),
        priors=priors,
        likelihood=GaussianMixtureLikelihood(k, dims),
        num_components=k,
        params={"k": k, "dims": dims, "weight_concentration": weight_concentration, **prior},
    )
