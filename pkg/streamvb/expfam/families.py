"""Concrete exponential families

Conventions (natural coordinates, base measure h = 1 unless stated):

- Beta: eta = (alpha - 1, beta - 1), t(x) = (ln x, ln(1 - x)).
- Dirichlet-K: eta = alpha - 1, t(x) = ln x.
- Gamma: eta = (shape - 1, -rate), t(x) = (ln x, x).
- NormalGamma over (mu, tau): eta = (kappa mu0, -kappa/2, a - 1/2, -b - kappa mu0^2/2),
  t = (tau mu, tau mu^2, ln tau, tau); the 1/2 ln(2 pi) of the Gaussian factor is
  folded into the log-normalizer.
- Normal over a scalar: eta = (p m, -p/2), t(x) = (x, x^2).
- NormalKnownPrecision(tau): eta = tau m, t(x) = x, h(x) = exp(-tau x^2 / 2).

Observation statistics are what one data point adds to the natural parameters
of a block under its conjugate likelihood: a Bernoulli outcome y gives
(y, 1 - y) to a Beta block, a category k gives the one-hot vector to a
Dirichlet block, a zero-mean Gaussian residual r gives (1/2, -r^2/2) to a Gamma
precision block, a Gaussian x gives (x, -1/2, 1/2, -x^2/2) to a NormalGamma
block and (x, -1/2) to a unit-precision Normal mean block.
"""

import math
from dataclasses import dataclass
from typing import Any, Tuple

import numpy as np
from scipy.special import betaln, digamma, gammaln

from ..errors import InvalidParameterError, SupportError
from .base import FamilyId, FamilySpec

LOG_2PI = math.log(2.0 * math.pi)


def _finite_scalar(x: Any, family: FamilySpec) -> float:
    try:
        value = float(x)
    except (TypeError, ValueError):
        raise SupportError(f"{family} expects a real observation, got {x!r}")
    if not math.isfinite(value):
        raise SupportError(f"{family} expects a finite observation, got {x!r}")
    return value


def _positive(name: str, value: float):
    if not (math.isfinite(value) and value > 0):
        raise InvalidParameterError(f"{name} must be positive and finite, got {value}", name)


@dataclass(frozen=True)
class BetaFamily(FamilySpec):
    family_id = FamilyId.BETA

    @property
    def dim(self) -> int:
        return 2

    @property
    def component_names(self) -> Tuple[str, ...]:
        return ("alpha", "beta")

    def domain_violation(self, eta):
        for name, value in zip(self.component_names, eta):
            if value <= -1.0:
                return name
        return None

    def log_normalizer(self, eta):
        return float(betaln(eta[0] + 1.0, eta[1] + 1.0))

    def mean_params(self, eta):
        a, b = eta + 1.0
        total = digamma(a + b)
        return np.array([digamma(a) - total, digamma(b) - total])

    def statistics(self, x):
        x = _finite_scalar(x, self)
        if not 0.0 < x < 1.0:
            raise SupportError(f"Beta draw must lie in (0, 1), got {x}")
        return np.array([math.log(x), math.log1p(-x)])

    def observation_stats(self, x):
        y = _finite_scalar(x, self)
        if y not in (0.0, 1.0):
            raise SupportError(f"Bernoulli outcome must be 0 or 1, got {x!r}")
        return np.array([y, 1.0 - y])

    def from_standard(self, alpha: float = 1.0, beta: float = 1.0):
        _positive("alpha", alpha)
        _positive("beta", beta)
        return np.array([alpha - 1.0, beta - 1.0])

    def to_standard(self, eta):
        return {"alpha": float(eta[0] + 1.0), "beta": float(eta[1] + 1.0)}

    def sample(self, eta, rng, size):
        return rng.beta(eta[0] + 1.0, eta[1] + 1.0, size=size)

    def ess(self, eta):
        return float(np.sum(eta + 1.0))


@dataclass(frozen=True)
class DirichletFamily(FamilySpec):
    k: int

    family_id = FamilyId.DIRICHLET

    def __post_init__(self):
        if self.k < 2:
            raise InvalidParameterError(f"Dirichlet needs at least 2 categories, got {self.k}", "k")

    @property
    def dim(self) -> int:
        return self.k

    @property
    def component_names(self) -> Tuple[str, ...]:
        return tuple(f"alpha_{i}" for i in range(self.k))

    def domain_violation(self, eta):
        for name, value in zip(self.component_names, eta):
            if value <= -1.0:
                return name
        return None

    def log_normalizer(self, eta):
        alpha = eta + 1.0
        return float(np.sum(gammaln(alpha)) - gammaln(np.sum(alpha)))

    def mean_params(self, eta):
        alpha = eta + 1.0
        return digamma(alpha) - digamma(np.sum(alpha))

    def statistics(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.k,) or np.any(x <= 0.0) or abs(np.sum(x) - 1.0) > 1e-9:
            raise SupportError(f"Dirichlet draw must be a point of the open {self.k}-simplex")
        return np.log(x)

    def observation_stats(self, x):
        try:
            category = int(x)
        except (TypeError, ValueError):
            raise SupportError(f"category must be an integer, got {x!r}")
        if category != x or not 0 <= category < self.k:
            raise SupportError(f"category must be an integer in [0, {self.k}), got {x!r}")
        stats = np.zeros(self.k)
        stats[category] = 1.0
        return stats

    def from_standard(self, alpha=None):
        alpha = np.ones(self.k) if alpha is None else np.asarray(alpha, dtype=float)
        if alpha.shape != (self.k,):
            raise InvalidParameterError(f"expected {self.k} concentrations, got {alpha.shape}", "alpha")
        for i, value in enumerate(alpha):
            _positive(f"alpha_{i}", float(value))
        return alpha - 1.0

    def to_standard(self, eta):
        return {"alpha": (eta + 1.0).tolist()}

    def sample(self, eta, rng, size):
        return rng.dirichlet(eta + 1.0, size=size)

    def ess(self, eta):
        return float(np.sum(eta + 1.0))


@dataclass(frozen=True)
class GammaFamily(FamilySpec):
    family_id = FamilyId.GAMMA

    @property
    def dim(self) -> int:
        return 2

    @property
    def component_names(self) -> Tuple[str, ...]:
        return ("shape", "rate")

    def domain_violation(self, eta):
        if eta[0] <= -1.0:
            return "shape"
        if eta[1] >= 0.0:
            return "rate"
        return None

    def log_normalizer(self, eta):
        shape, rate = eta[0] + 1.0, -eta[1]
        return float(gammaln(shape) - shape * math.log(rate))

    def mean_params(self, eta):
        shape, rate = eta[0] + 1.0, -eta[1]
        return np.array([digamma(shape) - math.log(rate), shape / rate])

    def statistics(self, x):
        x = _finite_scalar(x, self)
        if x <= 0.0:
            raise SupportError(f"Gamma draw must be positive, got {x}")
        return np.array([math.log(x), x])

    def observation_stats(self, x):
        r = _finite_scalar(x, self)
        return np.array([0.5, -0.5 * r * r])

    def from_standard(self, shape: float = 1.0, rate: float = 1.0):
        _positive("shape", shape)
        _positive("rate", rate)
        return np.array([shape - 1.0, -rate])

    def to_standard(self, eta):
        return {"shape": float(eta[0] + 1.0), "rate": float(-eta[1])}

    def sample(self, eta, rng, size):
        return rng.gamma(eta[0] + 1.0, 1.0 / -eta[1], size=size)

    def ess(self, eta):
        # each Gaussian residual adds 1/2 to the shape
        return float(2.0 * (eta[0] + 1.0))


@dataclass(frozen=True)
class NormalGammaFamily(FamilySpec):
    family_id = FamilyId.NORMAL_GAMMA

    @property
    def dim(self) -> int:
        return 4

    @property
    def component_names(self) -> Tuple[str, ...]:
        return ("mu0", "kappa", "shape", "rate")

    @staticmethod
    def _unpack(eta):
        kappa = -2.0 * eta[1]
        mu0 = eta[0] / kappa if kappa > 0 else 0.0
        shape = eta[2] + 0.5
        rate = -eta[3] - 0.5 * kappa * mu0 * mu0
        return mu0, kappa, shape, rate

    def domain_violation(self, eta):
        if eta[1] >= 0.0:
            return "kappa"
        _, _, shape, rate = self._unpack(eta)
        if shape <= 0.0:
            return "shape"
        if rate <= 0.0:
            return "rate"
        return None

    def log_normalizer(self, eta):
        _, kappa, shape, rate = self._unpack(eta)
        return float(gammaln(shape) - shape * math.log(rate) - 0.5 * math.log(kappa) + 0.5 * LOG_2PI)

    def mean_params(self, eta):
        mu0, kappa, shape, rate = self._unpack(eta)
        e_tau = shape / rate
        return np.array([
            mu0 * e_tau,
            1.0 / kappa + mu0 * mu0 * e_tau,
            digamma(shape) - math.log(rate),
            e_tau,
        ])

    def statistics(self, x):
        mu, tau = (float(v) for v in x)
        if not (math.isfinite(mu) and math.isfinite(tau)) or tau <= 0.0:
            raise SupportError(f"NormalGamma draw needs a finite mean and positive precision, got {x!r}")
        return np.array([tau * mu, tau * mu * mu, math.log(tau), tau])

    def observation_stats(self, x):
        x = _finite_scalar(x, self)
        return np.array([x, -0.5, 0.5, -0.5 * x * x])

    def from_standard(self, shape: float = 1.0, rate: float = 1.0, mu0: float = 0.0, kappa: float = 1e-10):
        _positive("shape", shape)
        _positive("rate", rate)
        _positive("kappa", kappa)
        if not math.isfinite(mu0):
            raise InvalidParameterError(f"mu0 must be finite, got {mu0}", "mu0")
        return np.array([kappa * mu0, -0.5 * kappa, shape - 0.5, -rate - 0.5 * kappa * mu0 * mu0])

    def to_standard(self, eta):
        mu0, kappa, shape, rate = self._unpack(eta)
        return {"shape": float(shape), "rate": float(rate), "mu0": float(mu0), "kappa": float(kappa)}

    def sample(self, eta, rng, size):
        mu0, kappa, shape, rate = self._unpack(eta)
        tau = rng.gamma(shape, 1.0 / rate, size=size)
        mu = rng.normal(mu0, 1.0 / np.sqrt(kappa * tau))
        return np.column_stack([mu, tau])

    def ess(self, eta):
        return float(-2.0 * eta[1])


@dataclass(frozen=True)
class NormalFamily(FamilySpec):
    family_id = FamilyId.NORMAL

    @property
    def dim(self) -> int:
        return 2

    @property
    def component_names(self) -> Tuple[str, ...]:
        return ("mean", "precision")

    def domain_violation(self, eta):
        return "precision" if eta[1] >= 0.0 else None

    def log_normalizer(self, eta):
        return float(-eta[0] ** 2 / (4.0 * eta[1]) - 0.5 * math.log(-2.0 * eta[1]) + 0.5 * LOG_2PI)

    def mean_params(self, eta):
        precision = -2.0 * eta[1]
        mean = eta[0] / precision
        return np.array([mean, mean * mean + 1.0 / precision])

    def statistics(self, x):
        x = _finite_scalar(x, self)
        return np.array([x, x * x])

    def observation_stats(self, x):
        x = _finite_scalar(x, self)
        return np.array([x, -0.5])

    def from_standard(self, mean: float = 0.0, precision: float = 1e-10):
        _positive("precision", precision)
        if not math.isfinite(mean):
            raise InvalidParameterError(f"mean must be finite, got {mean}", "mean")
        return np.array([precision * mean, -0.5 * precision])

    def to_standard(self, eta):
        precision = -2.0 * eta[1]
        return {"mean": float(eta[0] / precision), "precision": float(precision)}

    def sample(self, eta, rng, size):
        precision = -2.0 * eta[1]
        return rng.normal(eta[0] / precision, 1.0 / math.sqrt(precision), size=size)

    def ess(self, eta):
        return float(-2.0 * eta[1])


@dataclass(frozen=True)
class NormalKnownPrecisionFamily(FamilySpec):
    """Gaussian with fixed precision; uses the non-trivial base measure exp(-tau x^2 / 2)"""
    precision: float = 1.0

    family_id = FamilyId.NORMAL_KNOWN_PRECISION

    def __post_init__(self):
        _positive("precision", self.precision)

    @property
    def dim(self) -> int:
        return 1

    @property
    def component_names(self) -> Tuple[str, ...]:
        return ("mean",)

    def domain_violation(self, eta):
        return None

    def log_normalizer(self, eta):
        tau = self.precision
        return float(eta[0] ** 2 / (2.0 * tau) + 0.5 * (LOG_2PI - math.log(tau)))

    def mean_params(self, eta):
        return np.array([eta[0] / self.precision])

    def statistics(self, x):
        return np.array([_finite_scalar(x, self)])

    def log_base_measure(self, x):
        x = _finite_scalar(x, self)
        return -0.5 * self.precision * x * x

    def observation_stats(self, x):
        return self.statistics(x)

    def from_standard(self, mean: float = 0.0):
        if not math.isfinite(mean):
            raise InvalidParameterError(f"mean must be finite, got {mean}", "mean")
        return np.array([self.precision * mean])

    def to_standard(self, eta):
        return {"mean": float(eta[0] / self.precision)}

    def sample(self, eta, rng, size):
        return rng.normal(eta[0] / self.precision, 1.0 / math.sqrt(self.precision), size=size)


BETA = BetaFamily()
GAMMA = GammaFamily()
NORMAL_GAMMA = NormalGammaFamily()
NORMAL = NormalFamily()


def dirichlet(k: int) -> DirichletFamily:
    return DirichletFamily(k)


def normal_known_precision(precision: float = 1.0) -> NormalKnownPrecisionFamily:
    return NormalKnownPrecisionFamily(precision)
