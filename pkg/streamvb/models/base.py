"""Model specification and observation-model interface"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, Mapping, Optional, Tuple

import numpy as np
from scipy.special import logsumexp

from ..errors import EmptyBatchError, FamilyMismatchError, InvalidParameterError, SupportError, UnsupportedModelError
from ..expfam import FamilySpec, NaturalParams
from ..rng import STREAM_PREDICTIVE, keyed_rng

logger = logging.getLogger(__name__)

# Natural parameters of every global block, keyed by block name
Params = Mapping[str, NaturalParams]


@dataclass(frozen=True, eq=False)
class LocalParams:
    """Per-observation responsibilities over mixture components"""
    responsibilities: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.responsibilities is None:
            return
        r = np.array(self.responsibilities, dtype=float)
        if r.ndim != 2 or np.any(r < 0.0) or not np.allclose(r.sum(axis=1), 1.0, rtol=0.0, atol=1e-9):
            raise InvalidParameterError("responsibilities must be non-negative rows summing to 1", "responsibilities")
        r.setflags(write=False)
        object.__setattr__(self, "responsibilities", r)

    @property
    def is_empty(self) -> bool:
        return self.responsibilities is None

    def entropy(self) -> float:
        if self.responsibilities is None:
            return 0.0
        r = self.responsibilities
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(r > 0.0, r * np.log(r), 0.0)
        return float(-terms.sum())


NO_LOCALS = LocalParams()


@dataclass(frozen=True, eq=False)
class ModelSpec:
    """Global parameter blocks, their priors, and the observation model"""
    name: str
    blocks: Tuple[Tuple[str, FamilySpec], ...]
    priors: Mapping[str, NaturalParams]
    likelihood: "Likelihood"
    num_components: Optional[int] = None
    params: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        names = [name for name, _ in self.blocks]
        if len(set(names)) != len(names):
            raise InvalidParameterError(f"duplicate block names in model {self.name}")
        if set(names) != set(self.priors):
            raise InvalidParameterError(f"model {self.name} needs exactly one prior per block")
        for name, family in self.blocks:
            if self.priors[name].family != family:
                raise FamilyMismatchError(f"prior of block {name} is {self.priors[name].family}, expected {family}")
        if self.num_components is not None and self.num_components < 2:
            raise InvalidParameterError("models with local latents need at least 2 components", "num_components")
        object.__setattr__(self, "priors", dict(self.priors))

    @property
    def block_names(self) -> Tuple[str, ...]:
        return tuple(name for name, _ in self.blocks)

    @property
    def likelihood_tag(self) -> str:
        return self.likelihood.tag

    def family(self, block: str) -> FamilySpec:
        return dict(self.blocks)[block]

    def check_params(self, params: Params, role: str = "parameters"):
        """Raise unless params has one value of the right family per block"""
        if set(params) != set(self.block_names):
            raise InvalidParameterError(
                f"{role} blocks {sorted(params)} do not match model blocks {sorted(self.block_names)}"
            )
        for name, family in self.blocks:
            if params[name].family != family:
                raise FamilyMismatchError(f"{role} of block {name} is {params[name].family}, expected {family}")


class Likelihood(ABC):
    """Observation model p(x, z | beta) over the global blocks of a ModelSpec

    Subclasses provide the expected sufficient statistics each block
    receives from a batch; global updates are ``prior + statistics``,
    applied block by block in declaration order.
    """

    tag: str = ""
    # One sweep reaches the exact posterior (no latents, no coupled blocks)
    conjugate_closed: bool = False
    supports_population_updates: bool = True

    @classmethod
    @abstractmethod
    def make_model(cls, **params: Any) -> ModelSpec:
        """Build the ModelSpec this likelihood belongs to"""
        pass

    @abstractmethod
    def check_data(self, model: ModelSpec, data: Any) -> np.ndarray:
        """Validate a batch and return it as an array (possibly empty)"""
        pass

    @abstractmethod
    def block_stats(self, model: ModelSpec, block: str, posterior: Params, local: LocalParams, X: np.ndarray) -> np.ndarray:
        """Summed expected sufficient statistics of one block, given the other factors"""
        pass

    @abstractmethod
    def expected_log_likelihood(self, model: ModelSpec, posterior: Params, local: LocalParams, X: np.ndarray) -> float:
        """E_q[ln p(x, z | beta)]"""
        pass

    @abstractmethod
    def log_likelihood(self, model: ModelSpec, draw: Mapping[str, Any], X: np.ndarray) -> np.ndarray:
        """Per-point ln p(x_i | beta) for one joint draw of the global blocks, latents summed out"""
        pass

    @abstractmethod
    def summary(self, model: ModelSpec, posterior: Params) -> Dict[str, float]:
        pass

    def update_locals(self, model: ModelSpec, posterior: Params, X: np.ndarray) -> LocalParams:
        return NO_LOCALS

    def initial_locals(self, model: ModelSpec, start: Params, X: np.ndarray, seed: int) -> LocalParams:
        """Locals of the first sweep, computed from the starting parameters"""
        return self.update_locals(model, start, X)

    def update_globals(self, model: ModelSpec, prior: Params, posterior: Params, local: LocalParams, X: np.ndarray) -> Dict[str, NaturalParams]:
        updated = dict(posterior)
        for name, _ in model.blocks:
            stats = self.block_stats(model, name, updated, local, X)
            updated[name] = prior[name].replace(prior[name].eta + stats)
        return updated

    def log_predictive(self, model: ModelSpec, posterior: Params, X: np.ndarray) -> np.ndarray:
        """Closed-form per-point log posterior predictive density"""
        raise UnsupportedModelError(f"no closed-form predictive for {self.tag}")

    def sample_posterior(self, model: ModelSpec, posterior: Params, rng: np.random.Generator, size: int) -> Dict[str, np.ndarray]:
        return {name: family.sample(posterior[name].eta, rng, size) for name, family in model.blocks}

    def monte_carlo_log_predictive(self, model: ModelSpec, posterior: Params, X: np.ndarray, num_samples: int = 1000, seed: int = 0) -> Tuple[np.ndarray, np.ndarray]:
        """Per-point log predictive estimated from posterior draws

        Returns the (num_samples, n) matrix of per-draw log-likelihoods and
        the per-point log-mean-exp over draws.
        """
        rng = keyed_rng(seed, STREAM_PREDICTIVE)
        samples = self.sample_posterior(model, posterior, rng, num_samples)
        loglik = np.stack([
            self.log_likelihood(model, {name: values[s] for name, values in samples.items()}, X)
            for s in range(num_samples)
        ])
        return loglik, logsumexp(loglik, axis=0) - np.log(num_samples)


def as_observations(data: Any) -> Any:
    """Training observations of a Batch, or the data itself"""
    return getattr(data, "train", data)


def as_scalar_array(data: Any, allow_empty: bool = True) -> np.ndarray:
    X = np.asarray(as_observations(data), dtype=float).reshape(-1)
    if X.size == 0 and not allow_empty:
        raise EmptyBatchError("batch contains no observations")
    if not np.all(np.isfinite(X)):
        raise SupportError("observations must be finite")
    return X
