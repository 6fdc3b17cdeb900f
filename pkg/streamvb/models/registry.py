"""Registry of model factories, looked up by the name used in config files"""

import logging
from typing import Any, Callable, Dict, Optional

from ..errors import ConfigError
from .base import ModelSpec

logger = logging.getLogger(__name__)

ModelFactory = Callable[..., ModelSpec]


class ModelRegistry:
    """Registry for managing and looking up model factories"""

    def __init__(self):
        self._factories: Dict[str, ModelFactory] = {}

    def register(self, name: str, factory: ModelFactory):
        if name in self._factories and self._factories[name] is not factory:
            logger.warning(f"Replacing model factory: {name}")
        self._factories[name] = factory
        logger.debug(f"Registered model: {name}")

    def get(self, name: str) -> Optional[ModelFactory]:
        return self._factories.get(name)

    def has_model(self, name: str) -> bool:
        return name in self._factories

    def list_models(self) -> Dict[str, str]:
        return {name: (factory.__doc__ or "").strip().split("\n")[0] for name, factory in self._factories.items()}

    def build(self, name: str, params: Dict[str, Any] | None = None) -> ModelSpec:
        factory = self.get(name)
        if factory is None:
            raise ConfigError(f"unknown model '{name}'; available: {', '.join(sorted(self._factories))}")
        try:
            return factory(**(params or {}))
        except TypeError as e:
            raise ConfigError(f"bad parameters for model '{name}': {e}")


# Global registry instance
_registry: ModelRegistry | None = None


def get_registry() -> ModelRegistry:
    """Get or create the global model registry, with the built-in models registered"""
    global _registry
    if _registry is None:
        _registry = ModelRegistry()
        from .builtin import register_builtin_models
        register_builtin_models(_registry)
    return _registry


def register_model(name: str, factory: ModelFactory):
    get_registry().register(name, factory)


def build_model(name: str, params: Dict[str, Any] | None = None) -> ModelSpec:
    return get_registry().build(name, params)
