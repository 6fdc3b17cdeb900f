"""Power priors with a learned forgetting factor

The forgetting factor rho in [0, 1] has the variational posterior
q(rho | omega) with density proportional to exp(omega * rho) on [0, 1]. The
prior p(rho | gamma) uses the same form with natural parameter +gamma, so
omega > 0 favours remembering the previous posterior and omega < 0 favours
resetting towards the uninformative prior.
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import Any, Dict, Mapping, Optional, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from .engine import FitConfig, FitResult, fit_batch, relative_increase
from .errors import FamilyMismatchError, InvalidParameterError
from .expfam import NaturalParams, kl_divergence
from .models.base import ModelSpec, Params

logger = logging.getLogger(__name__)

DEFAULT_GAMMA = 0.1
SHARED = "shared"
SERIES_THRESHOLD = 1e-4
QUADRATURE_NODES = 64


def _check_finite(name: str, value: float):
    if not math.isfinite(value):
        raise InvalidParameterError(f"{name} must be finite, got {value}", name)


def expected_rho(s: "TruncExp | float") -> float:
    """E[rho] = 1 / (1 - exp(-omega)) - 1 / omega, with E[rho](0) = 1/2"""
    omega = s.omega if isinstance(s, TruncExp) else float(s)
    _check_finite("omega", omega)
    if abs(omega) < SERIES_THRESHOLD:
        return 0.5 + omega / 12.0 - omega ** 3 / 720.0
    if omega < 0.0:
        return 1.0 - expected_rho(-omega)
    return -1.0 / math.expm1(-omega) - 1.0 / omega


def truncexp_log_normalizer(omega: float) -> float:
    """a_g(omega) = ln((exp(omega) - 1) / omega)"""
    _check_finite("omega", omega)
    if abs(omega) < SERIES_THRESHOLD:
        return omega / 2.0 + omega ** 2 / 24.0 - omega ** 4 / 2880.0
    if omega > 0.0:
        return omega + math.log(-math.expm1(-omega)) - math.log(omega)
    return math.log(-math.expm1(omega)) - math.log(-omega)


def truncexp_variance(omega: float) -> float:
    """Var[rho], the second derivative of a_g"""
    _check_finite("omega", omega)
    if abs(omega) < 1e-2:
        return 1.0 / 12.0 - omega ** 2 / 240.0 + omega ** 4 / 6048.0
    if abs(omega) > 700.0:
        return 1.0 / omega ** 2
    return 1.0 / omega ** 2 - 1.0 / (4.0 * math.sinh(omega / 2.0) ** 2)


def truncexp_kl(omega: float, gamma: float) -> float:
    """KL(q(rho | omega) || p(rho | gamma))"""
    return (omega - gamma) * expected_rho(omega) - truncexp_log_normalizer(omega) + truncexp_log_normalizer(gamma)


@dataclass(frozen=True)
class TruncExp:
    """Truncated exponential on [0, 1] with natural parameter omega and prior parameter gamma"""
    omega: float
    gamma: float = DEFAULT_GAMMA

    def __post_init__(self):
        _check_finite("omega", self.omega)
        _check_finite("gamma", self.gamma)

    @property
    def expected_rho(self) -> float:
        return expected_rho(self.omega)

    def kl_to_prior(self) -> float:
        return truncexp_kl(self.omega, self.gamma)

    def quadrature(self, nodes: int = QUADRATURE_NODES) -> Tuple[np.ndarray, np.ndarray]:
        """Gauss-Legendre nodes on [0, 1] with weights proportional to q(rho), normalized"""
        x, w = leggauss(nodes)
        rho = 0.5 * (x + 1.0)
        log_w = np.log(0.5 * w) + self.omega * rho
        w = np.exp(log_w - log_w.max())
        return rho, w / w.sum()


def power_prior_combine(lambda_prev: NaturalParams, alpha_u: NaturalParams, rho: float) -> NaturalParams:
    """Natural parameters rho * lambda_prev + (1 - rho) * alpha_u"""
    if not lambda_prev.same_family(alpha_u):
        raise FamilyMismatchError(f"cannot mix {lambda_prev.family} with {alpha_u.family}")
    if not (0.0 <= rho <= 1.0):
        raise InvalidParameterError(f"rho must lie in [0, 1], got {rho}", "rho")
    return lambda_prev.replace(rho * lambda_prev.eta + (1.0 - rho) * alpha_u.eta)


def update_omega(kl_to_uninformative: float, kl_to_delta: float, gamma: float) -> float:
    """Fixed point omega* = KL(q || p_u) - KL(q || p_delta) + gamma"""
    for name, value in (("kl_to_uninformative", kl_to_uninformative), ("kl_to_delta", kl_to_delta), ("gamma", gamma)):
        _check_finite(name, value)
    return kl_to_uninformative - kl_to_delta + gamma


@dataclass(frozen=True, eq=False)
class DriftState:
    """Variational state of the forgetting factors

    ``factors`` holds one TruncExp under the key ``"shared"`` in shared mode
    and one per global block otherwise. A ``pinned_rho`` replaces q(rho) by
    a point mass.
    """
    factors: Mapping[str, TruncExp]
    uninformative_prior: Mapping[str, NaturalParams]
    shared: bool = True
    pinned_rho: Optional[float] = None

    def __post_init__(self):
        blocks = set(self.uninformative_prior)
        if self.shared:
            if set(self.factors) != {SHARED}:
                raise InvalidParameterError("shared drift state needs exactly one factor")
        elif set(self.factors) != blocks:
            raise InvalidParameterError("per-block drift state needs exactly one factor per block")
        if self.pinned_rho is not None and not (0.0 <= self.pinned_rho <= 1.0):
            raise InvalidParameterError(f"pinned rho must lie in [0, 1], got {self.pinned_rho}", "pinned_rho")
        object.__setattr__(self, "factors", dict(self.factors))
        object.__setattr__(self, "uninformative_prior", dict(self.uninformative_prior))

    @classmethod
    def create(cls, model: ModelSpec, gamma: float = DEFAULT_GAMMA, shared: bool = True,
               pinned_rho: Optional[float] = None, uninformative_prior: Optional[Params] = None) -> "DriftState":
        keys = [SHARED] if shared else list(model.block_names)
        return cls(
            factors={key: TruncExp(gamma, gamma) for key in keys},
            uninformative_prior=dict(uninformative_prior or model.priors),
            shared=shared,
            pinned_rho=pinned_rho,
        )

    def factor_for(self, block: str) -> TruncExp:
        return self.factors[SHARED if self.shared else block]

    def expected_rho(self, block: str) -> float:
        if self.pinned_rho is not None:
            return self.pinned_rho
        return self.factor_for(block).expected_rho

    def expected_rhos(self) -> Dict[str, float]:
        """E[rho] per factor key"""
        if self.pinned_rho is not None:
            return {key: self.pinned_rho for key in self.factors}
        return {key: s.expected_rho for key, s in self.factors.items()}

    def reset(self) -> "DriftState":
        """Every omega back to its prior value gamma"""
        return replace(self, factors={key: TruncExp(s.gamma, s.gamma) for key, s in self.factors.items()})

    def with_omegas(self, omegas: Mapping[str, float]) -> "DriftState":
        return replace(self, factors={key: TruncExp(omegas.get(key, s.omega), s.gamma) for key, s in self.factors.items()})

    def updated(self, kl_u: Mapping[str, float], kl_delta: Mapping[str, float]) -> "DriftState":
        """Apply the omega fixed point from per-block KL values"""
        if self.shared:
            s = self.factors[SHARED]
            omega = update_omega(sum(kl_u.values()), sum(kl_delta.values()), s.gamma)
            return self.with_omegas({SHARED: omega})
        return self.with_omegas({
            block: update_omega(kl_u[block], kl_delta[block], s.gamma) for block, s in self.factors.items()
        })

    def blocks_of(self, key: str, model: ModelSpec) -> Tuple[str, ...]:
        return model.block_names if key == SHARED else (key,)


def _as_state(s: "DriftState | TruncExp", model: ModelSpec, alpha_u: Params) -> DriftState:
    if isinstance(s, DriftState):
        return s
    return DriftState(factors={SHARED: s}, uninformative_prior=alpha_u, shared=True)


def double_lower_bound(model: ModelSpec, lambda_prev: Params, alpha_u: Params, fit: FitResult,
                       s: "DriftState | TruncExp", data: Any) -> float:
    """The bound L-hat, linear in E[rho] by Jensen on the log-normalizer

    L-hat = E[ln p(x, Z | beta)] + H[q(Z)]
            - sum_b (E[rho_b] KL(q_b || p_delta,b) + (1 - E[rho_b]) KL(q_b || p_u,b))
            - sum_factors KL(q(rho) || p(rho))
    The last sum is omitted when rho is pinned.
    """
    state = _as_state(s, model, alpha_u)
    model.check_params(lambda_prev, "previous posterior")
    model.check_params(alpha_u, "uninformative prior")
    likelihood = model.likelihood
    X = likelihood.check_data(model, data)
    value = likelihood.expected_log_likelihood(model, fit.posterior, fit.locals, X) + fit.locals.entropy()
    for block in model.block_names:
        rho = state.expected_rho(block)
        q = fit.posterior[block]
        value -= rho * kl_divergence(q, lambda_prev[block]) + (1.0 - rho) * kl_divergence(q, alpha_u[block])
    if state.pinned_rho is None:
        value -= sum(factor.kl_to_prior() for factor in state.factors.values())
    return float(value)


def _rho_grid(state: DriftState, key: str, nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    if state.pinned_rho is not None:
        return np.array([state.pinned_rho]), np.array([1.0])
    return state.factors[key].quadrature(nodes)


def bound_gap(model: ModelSpec, lambda_prev: Params, alpha_u: Params, s: "DriftState | TruncExp",
              nodes: int = QUADRATURE_NODES) -> float:
    """L - L-hat = sum_b E_q[rho a(lambda_prev) + (1 - rho) a(alpha_u) - a(rho lambda_prev + (1 - rho) alpha_u)]"""
    state = _as_state(s, model, alpha_u)
    gap = 0.0
    for key in state.factors:
        rho, w = _rho_grid(state, key, nodes)
        for block in state.blocks_of(key, model):
            f = model.family(block)
            lam, alpha = lambda_prev[block].eta, alpha_u[block].eta
            a_lam, a_alpha = f.log_normalizer(lam), f.log_normalizer(alpha)
            values = [r * a_lam + (1.0 - r) * a_alpha - f.log_normalizer(r * lam + (1.0 - r) * alpha) for r in rho]
            gap += float(np.dot(w, values))
    return gap


def hpp_lower_bound(model: ModelSpec, lambda_prev: Params, alpha_u: Params, fit: FitResult,
                    s: "DriftState | TruncExp", data: Any, nodes: int = QUADRATURE_NODES) -> float:
    """The bound L with the exact mixed log-normalizer, integrated over rho by quadrature"""
    state = _as_state(s, model, alpha_u)
    likelihood = model.likelihood
    X = likelihood.check_data(model, data)
    value = likelihood.expected_log_likelihood(model, fit.posterior, fit.locals, X) + fit.locals.entropy()
    for key in state.factors:
        rho, w = _rho_grid(state, key, nodes)
        for block in state.blocks_of(key, model):
            f = model.family(block)
            q = fit.posterior[block].eta
            mu = f.mean_params(q)
            lam, alpha = lambda_prev[block].eta, alpha_u[block].eta
            cross = [np.dot(r * lam + (1.0 - r) * alpha, mu) - f.log_normalizer(r * lam + (1.0 - r) * alpha) for r in rho]
            value += float(np.dot(w, cross)) - (np.dot(q, mu) - f.log_normalizer(q))
    if state.pinned_rho is None:
        value -= sum(factor.kl_to_prior() for factor in state.factors.values())
    return float(value)


def hpp_fit_batch(model: ModelSpec, lambda_prev: Params, state: DriftState, data: Any,
                  cfg: FitConfig) -> Tuple[FitResult, DriftState, float]:
    """Alternate the conjugate fit under the mixed prior with the omega fixed point

    Returns the final fit, the updated drift state and the final L-hat.
    """
    model.check_params(lambda_prev, "previous posterior")
    model.check_params(state.uninformative_prior, "uninformative prior")
    if not state.shared and set(state.factors) != set(model.block_names):
        raise InvalidParameterError("drift factors do not align with model blocks")
    alpha_u = state.uninformative_prior
    state = state.reset()

    fit: Optional[FitResult] = None
    bound = -math.inf
    for iteration in range(1, cfg.max_iterations + 1):
        effective_prior = {
            block: power_prior_combine(lambda_prev[block], alpha_u[block], state.expected_rho(block))
            for block in model.block_names
        }
        fit = fit_batch(model, effective_prior, data, cfg, init=fit.posterior if fit is not None else None)

        if state.pinned_rho is not None:
            bound = double_lower_bound(model, lambda_prev, alpha_u, fit, state, data)
            break

        kl_u = {block: kl_divergence(fit.posterior[block], alpha_u[block]) for block in model.block_names}
        kl_delta = {block: kl_divergence(fit.posterior[block], lambda_prev[block]) for block in model.block_names}
        state = state.updated(kl_u, kl_delta)
        previous, bound = bound, double_lower_bound(model, lambda_prev, alpha_u, fit, state, data)
        logger.debug(f"outer iteration {iteration}: bound={bound:.6f} rho={state.expected_rhos()}")

        if iteration > 1 and relative_increase(previous, bound) < cfg.relative_tolerance:
            break

    return fit, state, bound
