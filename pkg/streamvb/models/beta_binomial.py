"""Beta-Binomial model: Bernoulli outcomes with a Beta prior on the success probability"""

from typing import Any, Dict, Mapping

import numpy as np

from ..errors import SupportError
from ..expfam import BETA, NaturalParams
from .base import LocalParams, Likelihood, ModelSpec, Params, as_scalar_array

BLOCK = "p"


class BernoulliLikelihood(Likelihood):
    tag = "bernoulli"
    conjugate_closed = True

    @classmethod
    def make_model(cls, prior_alpha: float = 1.0, prior_beta: float = 1.0) -> ModelSpec:
        return make_beta_binomial(prior_alpha, prior_beta)

    def check_data(self, model, data):
        X = as_scalar_array(data)
        if np.any((X != 0.0) & (X != 1.0)):
            raise SupportError("Bernoulli observations must be 0 or 1")
        return X

    def block_stats(self, model, block, posterior, local, X):
        successes = float(X.sum())
        return np.array([successes, X.size - successes])

    def expected_log_likelihood(self, model, posterior, local, X):
        stats = self.block_stats(model, BLOCK, posterior, local, X)
        return float(np.dot(stats, posterior[BLOCK].family.mean_params(posterior[BLOCK].eta)))

    def log_likelihood(self, model, draw: Mapping[str, Any], X):
        p = float(draw[BLOCK])
        return np.where(X == 1.0, np.log(p), np.log1p(-p))

    def log_predictive(self, model, posterior, X):
        std = posterior[BLOCK].standard()
        total = std["alpha"] + std["beta"]
        return np.where(X == 1.0, np.log(std["alpha"] / total), np.log(std["beta"] / total))

    def summary(self, model, posterior: Params) -> Dict[str, float]:
        std = posterior[BLOCK].standard()
        return {"mean": std["alpha"] / (std["alpha"] + std["beta"])}


def make_beta_binomial(prior_alpha: float = 1.0, prior_beta: float = 1.0) -> ModelSpec:
    """Single Beta block over the success probability"""
    prior = NaturalParams.from_standard(BETA, alpha=prior_alpha, beta=prior_beta)
    return ModelSpec(
        name="beta_binomial",
        blocks=((BLOCK, BETA),),
        priors={BLOCK: prior},
        likelihood=BernoulliLikelihood(),
        params={"prior_alpha": prior_alpha, "prior_beta": prior_beta},
    )
