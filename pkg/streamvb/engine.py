"""Mean-field coordinate ascent on one batch

Each sweep updates the local responsibilities from the current global
factors, then every global block in declaration order. The evidence lower
bound is recorded after each sweep; fitting stops after
``max_iterations`` sweeps or once the relative increase
``(L_k - L_{k-1}) / |L_{k-1}|`` drops below ``relative_tolerance``.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from .errors import ConsistencyError, EmptyBatchError
from .expfam import NaturalParams, kl_divergence
from .models.base import LocalParams, ModelSpec, Params

logger = logging.getLogger(__name__)

ASCENT_SLACK = 1e-8


class FitConfig(BaseModel):
    """Termination rule and seed of the coordinate ascent"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    max_iterations: int = Field(100, ge=1)
    relative_tolerance: float = Field(1e-4, gt=0)
    seed: int = Field(0, ge=0)


@dataclass(frozen=True, eq=False)
class FitResult:
    posterior: Dict[str, NaturalParams]
    locals: LocalParams
    elbo_trace: Tuple[float, ...]
    converged: bool

    @property
    def elbo(self) -> float:
        return self.elbo_trace[-1]

    @property
    def iterations(self) -> int:
        return len(self.elbo_trace)


def ascent_slack(value: float) -> float:
    return max(ASCENT_SLACK, 1e-12 * abs(value))


def relative_increase(previous: float, current: float) -> float:
    if previous == 0.0:
        return abs(current - previous)
    return (current - previous) / abs(previous)


def elbo(model: ModelSpec, prior: Params, posterior: Params, locals: LocalParams, data: Any) -> float:
    """E_q[ln p(x, z | beta)] + H[q(z)] - sum_b KL(q_b || p_b)"""
    model.check_params(prior, "prior")
    model.check_params(posterior, "posterior")
    likelihood = model.likelihood
    X = likelihood.check_data(model, data)
    value = likelihood.expected_log_likelihood(model, posterior, locals, X) + locals.entropy()
    for name in model.block_names:
        value -= kl_divergence(posterior[name], prior[name])
    return float(value)


def fit_batch(model: ModelSpec, prior: Params, data: Any, cfg: FitConfig, init: Optional[Params] = None) -> FitResult:
    """Fit the variational posterior of one batch against the given prior

    Args:
        model: Model whose blocks the prior and posterior cover
        prior: Natural parameters of the prior, one per block
        data: A Batch (its training part is used) or an array of observations
        cfg: Termination rule and seed
        init: Optional warm start; the first sweep's locals are computed from it

    Returns:
        FitResult with the final posterior, locals and ELBO trace
    """
    likelihood = model.likelihood
    X = likelihood.check_data(model, data)
    if len(X) == 0:
        raise EmptyBatchError("cannot fit an empty batch")
    model.check_params(prior, "prior")
    if init is not None:
        model.check_params(init, "initial posterior")

    posterior = dict(init if init is not None else prior)
    trace = []
    converged = False
    for sweep in range(1, cfg.max_iterations + 1):
        if sweep == 1 and init is None:
            local = likelihood.initial_locals(model, prior, X, cfg.seed)
        else:
            local = likelihood.update_locals(model, posterior, X)
        posterior = likelihood.update_globals(model, prior, posterior, local, X)
        value = elbo(model, prior, posterior, local, X)

        if trace and value < trace[-1] - ascent_slack(trace[-1]):
            raise ConsistencyError(
                f"ELBO decreased from {trace[-1]!r} to {value!r} at sweep {sweep} of model {model.name}"
            )
        trace.append(value)
        logger.debug(f"sweep {sweep}: elbo={value:.6f}")

        if likelihood.conjugate_closed:
            converged = True
            break
        if sweep > 1 and relative_increase(trace[-2], value) < cfg.relative_tolerance:
            converged = True
            break

    if not converged:
        logger.debug(f"fit_batch stopped after {cfg.max_iterations} sweeps without converging")
    return FitResult(posterior=posterior, locals=local, elbo_trace=tuple(trace), converged=converged)
