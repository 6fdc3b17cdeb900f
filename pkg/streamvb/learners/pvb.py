"""Population variational Bayes

One natural-gradient step per batch on the population ELBO:
``lambda_t = (1 - nu) lambda_{t-1} + nu (alpha_u + (M / |x_t|) sum_i E[t(x_i, z_i)])``,
with the local factors computed at ``lambda_{t-1}``. The locals depend
only on the global factors, so one pass gives their exact optimum.

The reported ELBO is the batch ELBO of ``lambda_t`` with ``lambda_{t-1}`` as
prior, the quantity SVB reports, not the population-scaled objective
the step ascends.
"""

import logging

from ..engine import elbo
from ..errors import EmptyBatchError, UnsupportedModelError
from .base import Learner, LearnerKind, LearnerState

logger = logging.getLogger(__name__)


class PVBLearner(Learner):
    kind = LearnerKind.PVB

    def step(self, state, data):
        model = state.model
        likelihood = model.likelihood
        if not likelihood.supports_population_updates:
            raise UnsupportedModelError(
                f"PVB needs closed-form population gradients, which {model.name} does not have"
            )
        X = likelihood.check_data(model, data)
        n = len(X)
        if n == 0:
            raise EmptyBatchError("cannot update on an empty batch")

        cfg = state.config
        population = n if cfg.population_size == "batch" else cfg.population_size
        nu = cfg.learning_rate
        previous = state.posterior

        local = likelihood.initial_locals(model, previous, X, cfg.fit.seed)
        posterior = {}
        for name in model.block_names:
            stats = likelihood.block_stats(model, name, previous, local, X)
            target = model.priors[name].eta + (population / n) * stats
            posterior[name] = previous[name].replace((1.0 - nu) * previous[name].eta + nu * target)

        value = elbo(model, previous, posterior, local, X)
        new_state = LearnerState(model=model, config=cfg, posterior=posterior, step=state.step + 1)
        return new_state, self.report(new_state, value)
