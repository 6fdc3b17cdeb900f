"""Bayesian linear regression with Gaussian feature marginals

Row layout is ``(x_1, ..., x_d, y)``. The response is
``y = b_0 + sum_i b_i x_i + noise`` with noise precision ``gamma``; each
feature has its own NormalGamma marginal. The joint over coefficients and
precision is not conjugate, so the mean-field factors
``q(b_0) ... q(b_d) q(gamma) q(feature_i)`` are updated one block at a time,
each given the current expectations of the others.
"""

import math
from typing import Any, Dict, Mapping

import numpy as np

from ..errors import InvalidParameterError, SupportError
from ..expfam import GAMMA, NORMAL, NORMAL_GAMMA, NaturalParams
from ..expfam.families import LOG_2PI
from ..rng import STREAM_PREDICTIVE, keyed_rng
from .base import Likelihood, ModelSpec, Params, as_observations
from .gaussian import DEFAULT_PRIOR, student_t_logpdf

NOISE = "noise"


def coef_block(i: int) -> str:
    return f"coef_{i}"


def feature_block(i: int) -> str:
    return f"feature_{i}"


class LinearRegressionLikelihood(Likelihood):
    tag = "linear_regression"
    supports_population_updates = False

    def __init__(self, num_features: int, predictive_samples: int = 1000, predictive_seed: int = 0):
        self.num_features = num_features
        self.predictive_samples = predictive_samples
        self.predictive_seed = predictive_seed

    @classmethod
    def make_model(cls, num_features: int = 1, **kwargs: Any) -> ModelSpec:
        return make_linear_regression(num_features, **kwargs)

    def check_data(self, model, data):
        X = np.asarray(as_observations(data), dtype=float)
        if X.size == 0:
            return X.reshape(0, self.num_features + 1)
        if X.ndim != 2 or X.shape[1] != self.num_features + 1:
            raise SupportError(f"regression rows need {self.num_features} features and a response")
        if not np.all(np.isfinite(X)):
            raise SupportError("observations must be finite")
        return X

    def _design(self, X: np.ndarray) -> np.ndarray:
        return np.column_stack([np.ones(X.shape[0]), X[:, :-1]])

    @staticmethod
    def _coef_moments(posterior: Params, count: int):
        means = np.empty(count)
        variances = np.empty(count)
        for i in range(count):
            std = posterior[coef_block(i)].standard()
            means[i] = std["mean"]
            variances[i] = 1.0 / std["precision"]
        return means, variances

    def _expected_sq_residuals(self, posterior: Params, X: np.ndarray) -> np.ndarray:
        Z = self._design(X)
        m, v = self._coef_moments(posterior, Z.shape[1])
        return (X[:, -1] - Z @ m) ** 2 + (Z * Z) @ v

    def block_stats(self, model, block, posterior, local, X):
        if block.startswith("feature_"):
            x = X[:, int(block.split("_")[1]) - 1]
            return np.array([x.sum(), -0.5 * x.size, 0.5 * x.size, -0.5 * np.dot(x, x)])
        if block == NOISE:
            return np.array([0.5 * X.shape[0], -0.5 * self._expected_sq_residuals(posterior, X).sum()])
        j = int(block.split("_")[1])
        Z = self._design(X)
        m, _ = self._coef_moments(posterior, Z.shape[1])
        e_gamma = posterior[NOISE].family.mean_params(posterior[NOISE].eta)[1]
        partial = X[:, -1] - Z @ m + Z[:, j] * m[j]
        return e_gamma * np.array([np.dot(Z[:, j], partial), -0.5 * np.dot(Z[:, j], Z[:, j])])

    def expected_log_likelihood(self, model, posterior, local, X):
        n = X.shape[0]
        if n == 0:
            return 0.0
        noise = posterior[NOISE]
        e_log_gamma, e_gamma = noise.family.mean_params(noise.eta)
        total = 0.5 * n * (e_log_gamma - LOG_2PI) - 0.5 * e_gamma * self._expected_sq_residuals(posterior, X).sum()
        for i in range(1, self.num_features + 1):
            q = posterior[feature_block(i)]
            stats = self.block_stats(model, feature_block(i), posterior, local, X)
            total += np.dot(stats, q.family.mean_params(q.eta)) - 0.5 * n * LOG_2PI
        return float(total)

    def log_likelihood(self, model, draw: Mapping[str, Any], X):
        Z = self._design(X)
        b = np.array([float(draw[coef_block(i)]) for i in range(Z.shape[1])])
        gamma = float(draw[NOISE])
        out = 0.5 * (math.log(gamma) - LOG_2PI) - 0.5 * gamma * (X[:, -1] - Z @ b) ** 2
        for i in range(1, self.num_features + 1):
            mu, tau = draw[feature_block(i)]
            out += 0.5 * (math.log(tau) - LOG_2PI) - 0.5 * tau * (X[:, i - 1] - mu) ** 2
        return out

    def log_predictive(self, model, posterior, X):
        """Feature marginals in closed form; the response by Monte-Carlo over the noise precision"""
        out = np.zeros(X.shape[0])
        for i in range(1, self.num_features + 1):
            out += student_t_logpdf(X[:, i - 1], posterior[feature_block(i)])
        Z = self._design(X)
        m, v = self._coef_moments(posterior, Z.shape[1])
        mean = Z @ m
        coef_var = (Z * Z) @ v
        rng = keyed_rng(self.predictive_seed, STREAM_PREDICTIVE)
        gammas = GAMMA.sample(posterior[NOISE].eta, rng, self.predictive_samples)
        var = coef_var[None, :] + 1.0 / gammas[:, None]
        logpdf = -0.5 * (LOG_2PI + np.log(var) + (X[:, -1] - mean) ** 2 / var)
        out += np.logaddexp.reduce(logpdf, axis=0) - math.log(self.predictive_samples)
        return out

    def summary(self, model, posterior: Params) -> Dict[str, float]:
        out = {f"coef_{i}": posterior[coef_block(i)].standard()["mean"] for i in range(self.num_features + 1)}
        std = posterior[NOISE].standard()
        out["noise_precision"] = std["shape"] / std["rate"]
        return out


def make_linear_regression(num_features: int, coef_precision: float = 1e-10, noise_shape: float = 1.0, noise_rate: float = 1.0) -> ModelSpec:
    """Flat Gaussian coefficients b_0..b_d, Gamma(1, 1) noise precision, NormalGamma features"""
    if num_features < 1:
        raise InvalidParameterError(f"num_features must be at least 1, got {num_features}", "num_features")
    blocks = [(coef_block(i), NORMAL) for i in range(num_features + 1)]
    priors = {coef_block(i): NaturalParams.from_standard(NORMAL, mean=0.0, precision=coef_precision) for i in range(num_features + 1)}
    blocks.append((NOISE, GAMMA))
    priors[NOISE] = NaturalParams.from_standard(GAMMA, shape=noise_shape, rate=noise_rate)
    feature_prior = NaturalParams.from_standard(NORMAL_GAMMA, **DEFAULT_PRIOR)
    for i in range(1, num_features + 1):
        blocks.append((feature_block(i), NORMAL_GAMMA))
        priors[feature_block(i)] = feature_prior
    return ModelSpec(
        name="linear_regression",
        blocks=tuple(blocks),
        priors=priors,
        likelihood=LinearRegressionLikelihood(num_features),
        params={"num_features": num_features, "coef_precision": coef_precision,
                "noise_shape": noise_shape, "noise_rate": noise_rate},
    )
