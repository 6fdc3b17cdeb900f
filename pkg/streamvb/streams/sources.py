"""Stream selection from configuration"""

from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..errors import ConfigError
from .base import Batch, DriftSchedule, Segment
from .csv_source import load_csv_stream
from .synthetic import generate_binomial_stream, generate_gaussian_stream

SYNTHETIC_KINDS = ("binomial", "gaussian")


class StreamConfig(BaseModel):
    """The ``stream`` section of an experiment config"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["binomial", "gaussian", "csv"]
    batch_size: Optional[int] = Field(None, ge=1)
    split: bool = False
    segments: Optional[List[Segment]] = None
    path: Optional[str] = None
    batch_column: str = "t"
    columns: Optional[List[str]] = None
    split_seed: Optional[int] = Field(None, ge=0)

    @model_validator(mode="after")
    def check_source(self) -> "StreamConfig":
        if self.kind == "csv":
            if not self.path:
                raise ValueError("csv streams need 'path'")
        elif not self.segments or self.batch_size is None:
            raise ValueError(f"{self.kind} streams need 'segments' and 'batch_size'")
        return self

    def schedule(self, seed: int) -> DriftSchedule:
        if self.kind not in SYNTHETIC_KINDS:
            raise ConfigError(f"{self.kind} streams have no drift schedule")
        return DriftSchedule(segments=self.segments, batch_size=self.batch_size, seed=seed, split=self.split)


def generate_stream(cfg: StreamConfig, seed: int) -> List[Batch]:
    """Generate a synthetic stream from its schedule"""
    schedule = cfg.schedule(seed)
    if cfg.kind == "binomial":
        return generate_binomial_stream(schedule)
    return generate_gaussian_stream(schedule)


def build_stream(cfg: StreamConfig, seed: int) -> List[Batch]:
    """Batches of a configured stream, synthetic or read from CSV"""
    if cfg.kind == "csv":
        split_seed = seed if cfg.split_seed is None else cfg.split_seed
        return load_csv_stream(cfg.path, cfg.batch_column, split_seed, cfg.columns)
    return generate_stream(cfg, seed)
