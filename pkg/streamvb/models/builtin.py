"""Built-in models available to every config file"""

from .beta_binomial import make_beta_binomial
from .gaussian import make_gaussian_model, make_normal_known_precision_model
from .mixture import make_mixture_model
from .regression import make_linear_regression

BUILTIN_MODELS = {
    "beta_binomial": make_beta_binomial,
    "gaussian": make_gaussian_model,
    "normal_known_precision": make_normal_known_precision_model,
    "mixture": make_mixture_model,
    "linear_regression": make_linear_regression,
}


def register_builtin_models(registry):
    for name, factory in BUILTIN_MODELS.items():
        registry.register(name, factory)
