"""Configuration management for streamvb"""

import os
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .engine import FitConfig
from .errors import ConfigError
from .learners.base import LearnerConfig
from .streams.sources import StreamConfig

OUTPUT_DIR_ENV = "STREAMVB_OUTPUT_DIR"


class Config:
    """Configuration loader and accessor"""

    def __init__(self, config_path: str = "config.yaml"):
        self.config_path = Path(config_path)
        self._config: Dict[str, Any] = {}
        self.load()

    def load(self):
        """Load configuration from YAML file"""
        if not self.config_path.exists():
            raise ConfigError(f"Config file not found: {self.config_path}")

        with open(self.config_path, 'r') as f:
            content = f.read()
            # Expand environment variables
            content = os.path.expandvars(content)
        try:
            self._config = yaml.safe_load(content) or {}
        except yaml.YAMLError as e:
            raise ConfigError(f"Invalid YAML in {self.config_path}: {e}")
        if not isinstance(self._config, dict):
            raise ConfigError(f"{self.config_path} must contain a mapping at the top level")

        if os.environ.get(OUTPUT_DIR_ENV):
            self._config["output_dir"] = os.environ[OUTPUT_DIR_ENV]

    def get(self, key: str, default: Any = None) -> Any:
        """Get configuration value using dot notation (e.g., 'stream.batch_size')"""
        keys = key.split('.')
        value = self._config

        for k in keys:
            if isinstance(value, dict):
                value = value.get(k)
                if value is None:
                    return default
            elif isinstance(value, list) and k.isdigit() and int(k) < len(value):
                value = value[int(k)]
            else:
                return default

        return value

    def set(self, key: str, value: Any):
        """Set a value using dot notation; list items are addressed by index (e.g., 'learners.0.rho')"""
        keys = key.split('.')
        target: Any = self._config
        for k in keys[:-1]:
            if isinstance(target, list):
                if not k.isdigit() or int(k) >= len(target):
                    raise ConfigError(f"Cannot set {key}: no list item {k}")
                target = target[int(k)]
            else:
                target = target.setdefault(k, {})
            if not isinstance(target, (dict, list)):
                raise ConfigError(f"Cannot set {key}: {k} is not a section")
        last = keys[-1]
        if isinstance(target, list):
            if not last.isdigit() or int(last) >= len(target):
                raise ConfigError(f"Cannot set {key}: no list item {last}")
            target[int(last)] = value
        else:
            target[last] = value

    def apply_overrides(self, overrides: List[str]):
        """Apply ``key=value`` overrides; values are parsed as YAML scalars or collections"""
        for item in overrides:
            key, sep, raw = item.partition("=")
            if not sep or not key:
                raise ConfigError(f"Override must look like key=value, got '{item}'")
            try:
                value = yaml.safe_load(raw)
            except yaml.YAMLError as e:
                raise ConfigError(f"Invalid override value for {key}: {e}")
            self.set(key.strip(), value)

    def as_dict(self) -> Dict[str, Any]:
        return self._config

    def __getitem__(self, key: str) -> Any:
        """Allow dict-like access"""
        return self.get(key)

    def __contains__(self, key: str) -> bool:
        """Check if key exists"""
        return self.get(key) is not None


class ModelConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str
    params: Dict[str, Any] = Field(default_factory=dict)


class LoggingConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    level: str = "INFO"
    file: Optional[str] = "streamvb.log"


class PluginsConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    directory: Optional[str] = None


class ExperimentConfig(BaseModel):
    """Validated experiment: model, stream, learners and output location"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    seed: int = Field(0, ge=0)
    output_dir: str = "traces"
    model: ModelConfig
    stream: StreamConfig
    fit: FitConfig = Field(default_factory=FitConfig)
    learners: List[LearnerConfig] = Field(min_length=1)
    plugins: PluginsConfig = Field(default_factory=PluginsConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)

    @model_validator(mode="before")
    @classmethod
    def inherit_fit(cls, data: Any) -> Any:
        """Learners without their own ``fit`` section use the experiment's, seeded by the experiment seed"""
        if not isinstance(data, dict):
            return data
        fit = {"seed": data.get("seed", 0), **(data.get("fit") or {})}
        learners = data.get("learners")
        if isinstance(learners, list):
            data = {**data, "learners": [
                {**learner, "fit": {**fit, **(learner.get("fit") or {})}} if isinstance(learner, dict) else learner
                for learner in learners
            ]}
        return data

    @model_validator(mode="after")
    def unique_learner_names(self) -> "ExperimentConfig":
        names = [learner.display_name for learner in self.learners]
        duplicates = sorted({name for name in names if names.count(name) > 1})
        if duplicates:
            raise ValueError(f"learner names must be unique, duplicated: {', '.join(duplicates)}")
        return self

    @classmethod
    def from_config(cls, config: Config) -> "ExperimentConfig":
        try:
            return cls.model_validate(config.as_dict())
        except ValidationError as e:
            raise ConfigError(f"Invalid configuration in {config.config_path}:\n{e}")


# Global config instance
_config: Config | None = None


def get_config(config_path: str = "config.yaml", reload: bool = False) -> Config:
    """Get or create global config instance; a different path or reload=True reads the file again"""
    global _config
    if reload or _config is None or _config.config_path != Path(config_path):
        _config = Config(config_path)
    return _config
