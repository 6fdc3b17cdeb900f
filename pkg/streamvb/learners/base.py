"""Learner configuration, state and interface"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..drift import DEFAULT_GAMMA, DriftState
from ..engine import FitConfig
from ..expfam import NaturalParams
from ..metrics import block_ess
from ..models.base import ModelSpec

logger = logging.getLogger(__name__)


class LearnerKind(str, Enum):
    SVB = "SVB"
    SVB_PP = "SVB_PP"
    PVB = "PVB"
    SVB_HPP = "SVB_HPP"
    SVB_MHPP = "SVB_MHPP"


HPP_KINDS = (LearnerKind.SVB_HPP, LearnerKind.SVB_MHPP)

# Fields each kind requires, and fields each kind accepts
REQUIRED_FIELDS = {
    LearnerKind.SVB: (),
    LearnerKind.SVB_PP: ("rho",),
    LearnerKind.PVB: ("population_size", "learning_rate"),
    LearnerKind.SVB_HPP: ("gamma",),
    LearnerKind.SVB_MHPP: ("gamma",),
}
OPTIONAL_FIELDS = {
    LearnerKind.SVB_HPP: ("pinned_rho",),
    LearnerKind.SVB_MHPP: ("pinned_rho",),
}
KIND_FIELDS = ("rho", "population_size", "learning_rate", "gamma", "pinned_rho")


class LearnerConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: LearnerKind
    name: Optional[str] = None
    rho: Optional[float] = Field(None, gt=0, le=1)
    population_size: Optional[int | Literal["batch"]] = None
    learning_rate: Optional[float] = Field(None, gt=0, le=1)
    gamma: Optional[float] = None
    pinned_rho: Optional[float] = Field(None, ge=0, le=1)
    fit: FitConfig = Field(default_factory=FitConfig)

    @model_validator(mode="before")
    @classmethod
    def default_gamma(cls, data: Any) -> Any:
        if isinstance(data, dict) and data.get("kind") in {k.value for k in HPP_KINDS}:
            data = {**data}
            data.setdefault("gamma", DEFAULT_GAMMA)
        return data

    @model_validator(mode="after")
    def check_kind_fields(self) -> "LearnerConfig":
        required = REQUIRED_FIELDS[self.kind]
        allowed = set(required) | set(OPTIONAL_FIELDS.get(self.kind, ()))
        for name in required:
            if getattr(self, name) is None:
                raise ValueError(f"{self.kind.value} requires '{name}'")
        for name in KIND_FIELDS:
            if name not in allowed and getattr(self, name) is not None:
                raise ValueError(f"'{name}' is not a parameter of {self.kind.value}")
        if isinstance(self.population_size, int) and self.population_size < 1:
            raise ValueError("population_size must be a positive integer or 'batch'")
        return self

    @property
    def display_name(self) -> str:
        if self.name:
            return self.name
        if self.kind == LearnerKind.SVB_PP:
            return f"SVB_PP_{self.rho:g}"
        if self.kind == LearnerKind.PVB:
            return f"PVB_{self.population_size}_{self.learning_rate:g}"
        return self.kind.value


@dataclass(frozen=True, eq=False)
class LearnerState:
    """Posterior after ``step`` batches, plus the drift state for HPP kinds"""
    model: ModelSpec
    config: LearnerConfig
    posterior: Dict[str, NaturalParams]
    drift: Optional[DriftState] = None
    step: int = 0


@dataclass(frozen=True)
class StepReport:
    t: int
    elbo: float
    ess: Dict[str, float] = field(default_factory=dict)
    expected_rho: Dict[str, float] = field(default_factory=dict)
    summary: Dict[str, float] = field(default_factory=dict)
    iterations: int = 1
    converged: bool = True


class Learner(ABC):
    """Abstract base class for the streaming learners"""

    kind: LearnerKind

    def init(self, model: ModelSpec, cfg: LearnerConfig) -> LearnerState:
        return LearnerState(model=model, config=cfg, posterior=dict(model.priors), step=0)

    @abstractmethod
    def step(self, state: LearnerState, data: Any) -> Tuple[LearnerState, StepReport]:
        """Absorb one batch and return the new state with its report"""
        pass

    @staticmethod
    def report(state: LearnerState, elbo: float, **kwargs: Any) -> StepReport:
        model = state.model
        return StepReport(
            t=state.step,
            elbo=float(elbo),
            ess=block_ess(model, state.posterior),
            summary=model.likelihood.summary(model, state.posterior),
            **kwargs,
        )
