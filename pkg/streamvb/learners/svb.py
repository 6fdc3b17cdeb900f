"""Streaming variational Bayes, with and without a fixed power prior"""

from ..drift import power_prior_combine
from ..engine import fit_batch
from .base import Learner, LearnerKind, LearnerState


class SVBLearner(Learner):
    """The previous posterior is the next prior"""
    kind = LearnerKind.SVB

    def prior_for(self, state: LearnerState):
        return state.posterior

    def step(self, state, data):
        fit = fit_batch(state.model, self.prior_for(state), data, state.config.fit)
        new_state = LearnerState(
            model=state.model,
            config=state.config,
            posterior=fit.posterior,
            step=state.step + 1,
        )
        return new_state, self.report(new_state, fit.elbo, iterations=fit.iterations, converged=fit.converged)


class SVBPowerPriorLearner(SVBLearner):
    """Prior rho * lambda_{t-1} + (1 - rho) * alpha_u with a fixed rho"""
    kind = LearnerKind.SVB_PP

    def prior_for(self, state):
        rho = state.config.rho
        return {
            name: power_prior_combine(state.posterior[name], state.model.priors[name], rho)
            for name in state.model.block_names
        }
