"""Exponential-family kernel"""

from .base import (
    FamilyId,
    FamilySpec,
    NaturalParams,
    ess,
    kl_divergence,
    log_normalizer,
    mean_params,
    sufficient_stats,
)
from .families import (
    BETA,
    GAMMA,
    NORMAL,
    NORMAL_GAMMA,
    BetaFamily,
    DirichletFamily,
    GammaFamily,
    NormalFamily,
    NormalGammaFamily,
    NormalKnownPrecisionFamily,
    dirichlet,
    normal_known_precision,
)

__all__ = [
    "FamilyId",
    "FamilySpec",
    "NaturalParams",
    "ess",
    "kl_divergence",
    "log_normalizer",
    "mean_params",
    "sufficient_stats",
    "BETA",
    "GAMMA",
    "NORMAL",
    "NORMAL_GAMMA",
    "BetaFamily",
    "DirichletFamily",
    "GammaFamily",
    "NormalFamily",
    "NormalGammaFamily",
    "NormalKnownPrecisionFamily",
    "dirichlet",
    "normal_known_precision",
]
