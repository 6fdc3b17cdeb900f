"""Streaming variational Bayes with hierarchical power priors

SVB_HPP shares one forgetting factor across all global blocks; SVB_MHPP
learns one per block.
"""

from ..drift import DriftState, hpp_fit_batch
from .base import Learner, LearnerKind, LearnerState


class HPPLearner(Learner):
    kind = LearnerKind.SVB_HPP
    shared = True

    def init(self, model, cfg):
        drift = DriftState.create(model, gamma=cfg.gamma, shared=self.shared, pinned_rho=cfg.pinned_rho)
        return LearnerState(model=model, config=cfg, posterior=dict(model.priors), drift=drift, step=0)

    def step(self, state, data):
        fit, drift, bound = hpp_fit_batch(state.model, state.posterior, state.drift, data, state.config.fit)
        new_state = LearnerState(
            model=state.model,
            config=state.config,
            posterior=fit.posterior,
            drift=drift,
            step=state.step + 1,
        )
        return new_state, self.report(
            new_state, bound, expected_rho=drift.expected_rhos(), iterations=fit.iterations, converged=fit.converged
        )


class MHPPLearner(HPPLearner):
    kind = LearnerKind.SVB_MHPP
    shared = False
