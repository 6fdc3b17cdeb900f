"""Plugin loader - discover Likelihood subclasses in a directory and register their models"""

import importlib.util
import inspect
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional, Type

from .base import Likelihood
from .registry import ModelRegistry, get_registry

logger = logging.getLogger(__name__)


class LikelihoodLoader:
    """Load observation-model plugins dynamically"""

    def __init__(self, plugins_directory: str = "./plugins", registry: Optional[ModelRegistry] = None):
        self.plugins_directory = Path(plugins_directory)
        self.registry = registry or get_registry()
        self.likelihoods: Dict[str, Type[Likelihood]] = {}

    def discover_plugins(self) -> List[Path]:
        """
        Discover plugin modules

        Looks for:
        - plugins/*.py files
        - plugins/*/plugin.py modules
        """
        if not self.plugins_directory.is_dir():
            logger.warning(f"Plugin directory not found: {self.plugins_directory}")
            return []

        discovered = [f for f in sorted(self.plugins_directory.glob("*.py")) if f.name != "__init__.py"]
        for directory in sorted(self.plugins_directory.glob("*/")):
            plugin_file = directory / "plugin.py"
            if plugin_file.exists():
                discovered.append(plugin_file)
        return discovered

    def load_plugin_from_file(self, file_path: Path) -> List[Type[Likelihood]]:
        """Import a plugin module and return the concrete Likelihood classes it defines"""
        module_name = f"streamvb_plugin_{file_path.parent.name}_{file_path.stem}"
        try:
            spec = importlib.util.spec_from_file_location(module_name, file_path)
            if spec is None or spec.loader is None:
                logger.error(f"Failed to load spec for {file_path}")
                return []

            module = importlib.util.module_from_spec(spec)
            sys.modules[module_name] = module
            spec.loader.exec_module(module)
        except Exception as e:
            logger.error(f"Error loading plugin from {file_path}: {e}", exc_info=True)
            return []

        found = [
            attr for attr in vars(module).values()
            if isinstance(attr, type)
            and issubclass(attr, Likelihood)
            and not inspect.isabstract(attr)
            and attr.__module__ == module_name
        ]
        if not found:
            logger.warning(f"No Likelihood class found in {file_path}")
        return found

    def load_all_plugins(self) -> int:
        """Load every plugin and register its model under the likelihood tag

        Returns:
            Number of likelihoods registered
        """
        discovered = self.discover_plugins()
        logger.info(f"Discovered {len(discovered)} plugin module(s)")

        for file_path in discovered:
            for cls in self.load_plugin_from_file(file_path):
                if not cls.tag:
                    logger.warning(f"Skipping {cls.__name__} from {file_path}: empty tag")
                    continue
                self.likelihoods[cls.tag] = cls
                self.registry.register(cls.tag, cls.make_model)
                logger.info(f"Loaded likelihood: {cls.tag} from {file_path}")

        return len(self.likelihoods)

    def get_likelihood(self, tag: str) -> Optional[Type[Likelihood]]:
        return self.likelihoods.get(tag)
