"""Exponential-family interface and natural-parameter values

Every family is described in natural coordinates: a density
``h(x) exp(eta . t(x) - a(eta))`` with log-normalizer ``a``, sufficient
statistics ``t`` and base measure ``h``. All mixing, KL and convexity
computations in the library run on the ``eta`` vectors held by
:class:`NaturalParams`; the ``from_standard``/``to_standard`` bijections
are only for input and output.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Tuple

import numpy as np

from ..errors import FamilyMismatchError, InvalidParameterError, UnsupportedFamilyError

logger = logging.getLogger(__name__)


class FamilyId(str, Enum):
    """Tags of the supported families"""
    BETA = "Beta"
    DIRICHLET = "Dirichlet"
    GAMMA = "Gamma"
    NORMAL_GAMMA = "NormalGamma"
    NORMAL = "Normal"
    NORMAL_KNOWN_PRECISION = "NormalKnownPrecision"


class FamilySpec(ABC):
    """Behavioral description of one exponential family"""

    family_id: FamilyId

    @property
    @abstractmethod
    def dim(self) -> int:
        """Natural-parameter dimension"""
        pass

    @property
    @abstractmethod
    def component_names(self) -> Tuple[str, ...]:
        """Names of the standard hyperparameters, used in error messages"""
        pass

    @abstractmethod
    def domain_violation(self, eta: np.ndarray) -> str | None:
        """Return the name of the offending component, or None if eta is in-domain"""
        pass

    @abstractmethod
    def log_normalizer(self, eta: np.ndarray) -> float:
        pass

    @abstractmethod
    def mean_params(self, eta: np.ndarray) -> np.ndarray:
        """Gradient of the log-normalizer, E[t(X)]"""
        pass

    @abstractmethod
    def statistics(self, x: Any) -> np.ndarray:
        """The family's own sufficient statistic t(x) of a draw x"""
        pass

    @abstractmethod
    def observation_stats(self, x: Any) -> np.ndarray:
        """Statistic a single observation contributes under the conjugate likelihood"""
        pass

    @abstractmethod
    def from_standard(self, **params: float) -> np.ndarray:
        pass

    @abstractmethod
    def to_standard(self, eta: np.ndarray) -> Dict[str, float]:
        pass

    @abstractmethod
    def sample(self, eta: np.ndarray, rng: np.random.Generator, size: int) -> np.ndarray:
        pass

    def log_base_measure(self, x: Any) -> float:
        """ln h(x); zero for every family that uses the h = 1 convention"""
        return 0.0

    def ess(self, eta: np.ndarray) -> float:
        raise UnsupportedFamilyError(f"ESS is not defined for family {self.family_id.value}")

    def log_density(self, eta: np.ndarray, x: Any) -> float:
        return float(np.dot(eta, self.statistics(x)) + self.log_base_measure(x) - self.log_normalizer(eta))

    def check_domain(self, eta: np.ndarray):
        """Raise InvalidParameterError if eta is outside the natural domain"""
        if eta.shape != (self.dim,):
            raise InvalidParameterError(
                f"{self.family_id.value} expects {self.dim} natural parameters, got shape {eta.shape}"
            )
        if not np.all(np.isfinite(eta)):
            raise InvalidParameterError(f"non-finite natural parameter for {self.family_id.value}", "eta")
        offending = self.domain_violation(eta)
        if offending is not None:
            raise InvalidParameterError(
                f"natural parameters {eta.tolist()} outside the {self.family_id.value} domain", offending
            )

    def in_domain(self, eta: np.ndarray) -> bool:
        try:
            self.check_domain(np.asarray(eta, dtype=float))
        except InvalidParameterError:
            return False
        return True

    def __str__(self) -> str:
        return self.family_id.value


@dataclass(frozen=True, eq=False)
class NaturalParams:
    """Immutable, domain-checked natural-parameter vector of one family"""
    family: FamilySpec
    eta: np.ndarray

    def __post_init__(self):
        eta = np.array(self.eta, dtype=float).reshape(-1)
        self.family.check_domain(eta)
        eta.setflags(write=False)
        object.__setattr__(self, "eta", eta)

    @classmethod
    def from_standard(cls, family: FamilySpec, **params: float) -> "NaturalParams":
        return cls(family, family.from_standard(**params))

    def standard(self) -> Dict[str, float]:
        return self.family.to_standard(self.eta)

    def replace(self, eta: np.ndarray) -> "NaturalParams":
        return NaturalParams(self.family, eta)

    def same_family(self, other: "NaturalParams") -> bool:
        return self.family == other.family

    def allclose(self, other: "NaturalParams", atol: float = 1e-12) -> bool:
        return self.same_family(other) and bool(np.allclose(self.eta, other.eta, rtol=0.0, atol=atol))

    def __repr__(self) -> str:
        return f"NaturalParams({self.family}, {self.eta.tolist()})"


def log_normalizer(p: NaturalParams) -> float:
    return p.family.log_normalizer(p.eta)


def mean_params(p: NaturalParams) -> np.ndarray:
    return p.family.mean_params(p.eta)


def kl_divergence(q: NaturalParams, p: NaturalParams) -> float:
    """KL(q || p) as the Bregman divergence of the log-normalizer"""
    if not q.same_family(p):
        raise FamilyMismatchError(f"cannot compare {q.family} with {p.family}")
    f = q.family
    return float(
        f.log_normalizer(p.eta) - f.log_normalizer(q.eta) - np.dot(p.eta - q.eta, f.mean_params(q.eta))
    )


def sufficient_stats(family: FamilySpec, x: Any) -> np.ndarray:
    """Statistic contributed by observation x to a block of the given family

    See each family's ``observation_stats`` for the convention.
    """
    return family.observation_stats(x)


def ess(p: NaturalParams) -> float:
    return float(p.family.ess(p.eta))
