"""Streaming learners behind a uniform batch-update interface"""

from .base import Learner, LearnerConfig, LearnerKind, LearnerState, StepReport
from .hpp import HPPLearner, MHPPLearner
from .pvb import PVBLearner
from .registry import LearnerRegistry, get_learner, get_registry, learner_init, learner_step
from .svb import SVBLearner, SVBPowerPriorLearner

__all__ = [
    "Learner",
    "LearnerConfig",
    "LearnerKind",
    "LearnerState",
    "StepReport",
    "HPPLearner",
    "MHPPLearner",
    "PVBLearner",
    "LearnerRegistry",
    "get_learner",
    "get_registry",
    "learner_init",
    "learner_step",
    "SVBLearner",
    "SVBPowerPriorLearner",
]
