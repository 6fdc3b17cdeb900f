"""Probabilistic models built on exponential-family blocks"""

from .base import NO_LOCALS, Likelihood, LocalParams, ModelSpec, Params
from .beta_binomial import BernoulliLikelihood, make_beta_binomial
from .gaussian import (
    GaussianLikelihood,
    NormalKnownPrecisionLikelihood,
    make_gaussian_model,
    make_normal_known_precision_model,
)
from .loader import LikelihoodLoader
from .mixture import GaussianMixtureLikelihood, make_mixture_model
from .registry import ModelRegistry, build_model, get_registry, register_model
from .regression import LinearRegressionLikelihood, make_linear_regression

__all__ = [
    "NO_LOCALS",
    "Likelihood",
    "LocalParams",
    "ModelSpec",
    "Params",
    "BernoulliLikelihood",
    "make_beta_binomial",
    "GaussianLikelihood",
    "NormalKnownPrecisionLikelihood",
    "make_gaussian_model",
    "make_normal_known_precision_model",
    "LikelihoodLoader",
    "GaussianMixtureLikelihood",
    "make_mixture_model",
    "ModelRegistry",
    "build_model",
    "get_registry",
    "register_model",
    "LinearRegressionLikelihood",
    "make_linear_regression",
]
