"""Gaussian observations with a NormalGamma prior, and the fixed-variance variant"""

import math
from typing import Any, Dict, Mapping

import numpy as np
from scipy import stats

from ..expfam import NORMAL, NORMAL_GAMMA, NaturalParams, normal_known_precision
from ..expfam.families import LOG_2PI
from .base import Likelihood, ModelSpec, Params, as_scalar_array

BLOCK = "gaussian"
MEAN_BLOCK = "mean"

DEFAULT_PRIOR = {"shape": 1.0, "rate": 1.0, "mu0": 0.0, "kappa": 1e-10}


def student_t_logpdf(x: np.ndarray, posterior: NaturalParams) -> np.ndarray:
    """Log predictive density of a NormalGamma posterior (a Student-t)"""
    std = posterior.standard()
    shape, rate, mu0, kappa = std["shape"], std["rate"], std["mu0"], std["kappa"]
    scale = math.sqrt(rate * (kappa + 1.0) / (shape * kappa))
    return stats.t.logpdf(x, df=2.0 * shape, loc=mu0, scale=scale)


class GaussianLikelihood(Likelihood):
    tag = "gaussian"
    conjugate_closed = True

    @classmethod
    def make_model(cls, **prior: float) -> ModelSpec:
        return make_gaussian_model(**prior)

    def check_data(self, model, data):
        return as_scalar_array(data)

    def block_stats(self, model, block, posterior, local, X):
        return np.array([X.sum(), -0.5 * X.size, 0.5 * X.size, -0.5 * np.dot(X, X)])

    def expected_log_likelihood(self, model, posterior, local, X):
        q = posterior[BLOCK]
        stats_ = self.block_stats(model, BLOCK, posterior, local, X)
        return float(np.dot(stats_, q.family.mean_params(q.eta)) - 0.5 * X.size * LOG_2PI)

    def log_likelihood(self, model, draw: Mapping[str, Any], X):
        mu, tau = draw[BLOCK]
        return 0.5 * (np.log(tau) - LOG_2PI) - 0.5 * tau * (X - mu) ** 2

    def log_predictive(self, model, posterior, X):
        return student_t_logpdf(X, posterior[BLOCK])

    def summary(self, model, posterior: Params) -> Dict[str, float]:
        std = posterior[BLOCK].standard()
        return {"mean": std["mu0"], "precision": std["shape"] / std["rate"]}


def make_gaussian_model(shape: float = 1.0, rate: float = 1.0, mu0: float = 0.0, kappa: float = 1e-10) -> ModelSpec:
    """One NormalGamma block over (mean, precision)"""
    prior = NaturalParams.from_standard(NORMAL_GAMMA, shape=shape, rate=rate, mu0=mu0, kappa=kappa)
    return ModelSpec(
        name="gaussian",
        blocks=((BLOCK, NORMAL_GAMMA),),
        priors={BLOCK: prior},
        likelihood=GaussianLikelihood(),
        params={"shape": shape, "rate": rate, "mu0": mu0, "kappa": kappa},
    )


class NormalKnownPrecisionLikelihood(Likelihood):
    """Gaussian observations with fixed precision and a Normal block over the mean"""
    tag = "normal_known_precision"
    conjugate_closed = True

    def __init__(self, precision: float = 1.0):
        self.observation = normal_known_precision(precision)

    @property
    def precision(self) -> float:
        return self.observation.precision

    @classmethod
    def make_model(cls, precision: float = 1.0, prior_mean: float = 0.0, prior_precision: float = 1e-10) -> ModelSpec:
        return make_normal_known_precision_model(precision, prior_mean, prior_precision)

    def check_data(self, model, data):
        return as_scalar_array(data)

    def block_stats(self, model, block, posterior, local, X):
        return self.precision * np.array([X.sum(), -0.5 * X.size])

    def expected_log_likelihood(self, model, posterior, local, X):
        q = posterior[MEAN_BLOCK]
        stats_ = self.block_stats(model, MEAN_BLOCK, posterior, local, X)
        base = sum(self.observation.log_base_measure(x) for x in X)
        log_norm_const = 0.5 * (LOG_2PI - math.log(self.precision))
        return float(np.dot(stats_, q.family.mean_params(q.eta)) + base - X.size * log_norm_const)

    def log_likelihood(self, model, draw: Mapping[str, Any], X):
        eta = np.array([self.precision * float(draw[MEAN_BLOCK])])
        return np.array([self.observation.log_density(eta, x) for x in X])

    def log_predictive(self, model, posterior, X):
        std = posterior[MEAN_BLOCK].standard()
        variance = 1.0 / std["precision"] + 1.0 / self.precision
        return stats.norm.logpdf(X, loc=std["mean"], scale=math.sqrt(variance))

    def summary(self, model, posterior: Params) -> Dict[str, float]:
        return {"mean": posterior[MEAN_BLOCK].standard()["mean"]}


def make_normal_known_precision_model(precision: float = 1.0, prior_mean: float = 0.0, prior_precision: float = 1e-10) -> ModelSpec:
    """Normal block over the mean of Gaussian data with known precision"""
    prior = NaturalParams.from_standard(NORMAL, mean=prior_mean, precision=prior_precision)
    return ModelSpec(
        name="normal_known_precision",
        blocks=((MEAN_BLOCK, NORMAL),),
        priors={MEAN_BLOCK: prior},
        likelihood=NormalKnownPrecisionLikelihood(precision),
        params={"precision": precision, "prior_mean": prior_mean, "prior_precision": prior_precision},
    )
