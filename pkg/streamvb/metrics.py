"""Evaluation quantities: equivalent sample size and test marginal log-likelihood"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import EmptyBatchError, TraceFormatError, UnsupportedFamilyError, UnsupportedModelError
from .expfam import FamilySpec, NaturalParams
from .models.base import ModelSpec, Params

logger = logging.getLogger(__name__)

MC_SAMPLES = 1000


@dataclass
class TraceRecord:
    """Metrics of one learner at one time step"""
    t: int
    learner: str
    elbo: float
    ess: Dict[str, float] = field(default_factory=dict)
    expected_rho: Dict[str, float] = field(default_factory=dict)
    tmll: Optional[float] = None
    summary: Dict[str, float] = field(default_factory=dict)
    test_size: Optional[int] = None

    def to_row(self) -> Dict[str, Any]:
        """Flatten into trace-file columns"""
        row: Dict[str, Any] = {"t": self.t, "learner": self.learner, "elbo": self.elbo}
        row.update({f"ess_{block}": value for block, value in self.ess.items()})
        for key, value in self.expected_rho.items():
            row["expected_rho" if key == "shared" else f"expected_rho_{key}"] = value
        if self.test_size is not None:
            row["test_size"] = self.test_size
        row["tmll"] = self.tmll
        row.update({f"summary_{name}": value for name, value in self.summary.items()})
        return row

    @classmethod
    def from_row(cls, row: Mapping[str, Any]) -> "TraceRecord":
        def prefixed(prefix: str) -> Dict[str, float]:
            return {k[len(prefix):]: float(v) for k, v in row.items() if k.startswith(prefix)}

        rho = prefixed("expected_rho_")
        if "expected_rho" in row:
            rho["shared"] = float(row["expected_rho"])
        tmll = row.get("tmll")
        test_size = row.get("test_size")
        return cls(
            t=int(row["t"]),
            learner=str(row["learner"]),
            elbo=float(row["elbo"]),
            ess=prefixed("ess_"),
            expected_rho=rho,
            tmll=None if tmll is None or (isinstance(tmll, float) and math.isnan(tmll)) else float(tmll),
            summary=prefixed("summary_"),
            test_size=None if test_size is None or math.isnan(float(test_size)) else int(test_size),
        )


def ess(family: FamilySpec, posterior: NaturalParams) -> float:
    """Pseudo-count mass: Beta/Dirichlet concentrations summed, NormalGamma kappa, Gamma twice the shape"""
    if posterior.family != family:
        raise UnsupportedFamilyError(f"posterior of family {posterior.family} passed as {family}")
    return family.ess(posterior.eta)


def block_ess(model: ModelSpec, posterior: Params) -> Dict[str, float]:
    """ESS of every block whose family defines one"""
    out = {}
    for name, family in model.blocks:
        try:
            out[name] = ess(family, posterior[name])
        except UnsupportedFamilyError:
            continue
    return out


def tmll(model: ModelSpec, posterior: Params, test: Any, num_samples: int = MC_SAMPLES, seed: int = 0) -> float:
    """Mean per-observation log posterior predictive density of a test set

    Closed form where the likelihood provides one, Monte-Carlo over q(beta) otherwise.
    """
    X = model.likelihood.check_data(model, test)
    if len(X) == 0:
        raise EmptyBatchError("TMLL needs a non-empty test set")
    try:
        return float(np.mean(model.likelihood.log_predictive(model, posterior, X)))
    except UnsupportedModelError:
        estimate, _ = monte_carlo_tmll(model, posterior, X, num_samples, seed)
        return estimate


def monte_carlo_tmll(model: ModelSpec, posterior: Params, test: Any, num_samples: int = MC_SAMPLES,
                     seed: int = 0) -> Tuple[float, float]:
    """Monte-Carlo TMLL with its delta-method standard error

    Every test point shares the same posterior draws, so the standard error
    is taken over the per-draw average of the linearized terms.
    """
    X = model.likelihood.check_data(model, test)
    if len(X) == 0:
        raise EmptyBatchError("TMLL needs a non-empty test set")
    loglik, log_pred = model.likelihood.monte_carlo_log_predictive(model, posterior, X, num_samples, seed)
    ratios = np.exp(loglik - log_pred[None, :])
    per_draw = ratios.mean(axis=1)
    stderr = float(per_draw.std(ddof=1) / math.sqrt(num_samples))
    return float(log_pred.mean()), stderr


def scored_records(trace: Sequence[TraceRecord]) -> List[TraceRecord]:
    """Records that count towards aggregated TMLL

    Steps whose batch had no held-out rows (``test_size == 0``) carry no
    TMLL and are skipped. Any other record without a finite TMLL is an error.
    """
    scored = []
    for record in trace:
        if record.test_size == 0 and record.tmll is None:
            continue
        if record.tmll is None or not math.isfinite(record.tmll):
            raise TraceFormatError(f"record t={record.t} of {record.learner} has no tmll")
        scored.append(record)
    return scored


def aggregate_tmll(trace: Sequence[TraceRecord]) -> float:
    """Sum of TMLL over the time steps of one learner that had a test set"""
    if not trace:
        raise TraceFormatError("cannot aggregate an empty trace")
    scored = scored_records(trace)
    if not scored:
        raise TraceFormatError(f"no step of {trace[0].learner} has a test set")
    skipped = len(trace) - len(scored)
    if skipped:
        logger.info(f"{trace[0].learner}: skipped {skipped} step(s) without test rows")
    return float(sum(record.tmll for record in scored))
