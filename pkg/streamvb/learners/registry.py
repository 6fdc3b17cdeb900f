"""Learner registry and the uniform init/step entry points"""

import logging
from typing import Any, Dict, Optional, Tuple

from ..errors import ConfigError
from ..models.base import ModelSpec
from .base import Learner, LearnerConfig, LearnerKind, LearnerState, StepReport
from .hpp import HPPLearner, MHPPLearner
from .pvb import PVBLearner
from .svb import SVBLearner, SVBPowerPriorLearner

logger = logging.getLogger(__name__)


class LearnerRegistry:
    """Registry for looking up learner implementations by kind"""

    def __init__(self):
        self._learners: Dict[LearnerKind, Learner] = {}

    def register(self, learner: Learner):
        self._learners[learner.kind] = learner
        logger.debug(f"Registered learner: {learner.kind.value}")

    def get(self, kind: LearnerKind) -> Optional[Learner]:
        return self._learners.get(kind)

    def list_learners(self) -> Dict[str, str]:
        return {kind.value: (type(learner).__doc__ or "").strip() for kind, learner in self._learners.items()}


# Global registry instance
_registry: LearnerRegistry | None = None


def get_registry() -> LearnerRegistry:
    """Get or create the global learner registry"""
    global _registry
    if _registry is None:
        _registry = LearnerRegistry()
        for learner in (SVBLearner(), SVBPowerPriorLearner(), PVBLearner(), HPPLearner(), MHPPLearner()):
            _registry.register(learner)
    return _registry


def get_learner(kind: LearnerKind) -> Learner:
    learner = get_registry().get(kind)
    if learner is None:
        raise ConfigError(f"no learner registered for kind {kind}")
    return learner


def learner_init(model: ModelSpec, cfg: LearnerConfig) -> LearnerState:
    """Initial state: the model priors at step 0"""
    return get_learner(cfg.kind).init(model, cfg)


def learner_step(state: LearnerState, data: Any) -> Tuple[LearnerState, StepReport]:
    """Absorb one batch; on error the caller's state is left untouched"""
    return get_learner(state.config.kind).step(state, data)
