"""Poisson counts with a Gamma prior on the rate"""

from typing import Dict

import numpy as np
from scipy.special import gammaln

from streamvb.errors import SupportError
from streamvb.expfam import GAMMA, NaturalParams
from streamvb.models import Likelihood, ModelSpec

BLOCK = "rate"


class PoissonLikelihood(Likelihood):
    tag = "poisson"
    conjugate_closed = True

    @classmethod
    def make_model(cls, shape: float = 1.0, rate: float = 1.0) -> ModelSpec:
        return ModelSpec(
            name="poisson",
            blocks=((BLOCK, GAMMA),),
            priors={BLOCK: NaturalParams.from_standard(GAMMA, shape=shape, rate=rate)},
            likelihood=cls(),
            params={"shape": shape, "rate": rate},
        )

    def check_data(self, model, data):
        X = np.asarray(getattr(data, "train", data), dtype=float).reshape(-1)
        if np.any(X < 0) or np.any(X != np.floor(X)):
            raise SupportError("Poisson observations must be non-negative integers")
        return X

    def block_stats(self, model, block, posterior, local, X):
        # x ln(lambda) - lambda in the Gamma statistics (ln lambda, lambda)
        return np.array([X.sum(), -float(X.size)])

    def expected_log_likelihood(self, model, posterior, local, X):
        q = posterior[BLOCK]
        stats = self.block_stats(model, BLOCK, posterior, local, X)
        return float(np.dot(stats, q.family.mean_params(q.eta)) - gammaln(X + 1.0).sum())

    def log_likelihood(self, model, draw, X):
        lam = float(draw[BLOCK])
        return X * np.log(lam) - lam - gammaln(X + 1.0)

    def log_predictive(self, model, posterior, X):
        std = posterior[BLOCK].standard()
        a, b = std["shape"], std["rate"]
        return gammaln(X + a) - gammaln(a) - gammaln(X + 1.0) + a * np.log(b / (b + 1.0)) - X * np.log(b + 1.0)

    def summary(self, model, posterior) -> Dict[str, float]:
        std = posterior[BLOCK].standard()
        return {"mean": std["shape"] / std["rate"]}
