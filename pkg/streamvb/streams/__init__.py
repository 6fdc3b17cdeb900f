"""Drifting-stream generators and CSV ingestion"""

from .base import Batch, DriftSchedule, Segment, holdout_mask, split_batch
from .csv_source import SCHEMA_VERSION, load_csv_stream, write_stream
from .sources import StreamConfig, build_stream, generate_stream
from .synthetic import generate_binomial_stream, generate_gaussian_stream

__all__ = [
    "Batch",
    "DriftSchedule",
    "Segment",
    "holdout_mask",
    "split_batch",
    "SCHEMA_VERSION",
    "load_csv_stream",
    "write_stream",
    "StreamConfig",
    "build_stream",
    "generate_stream",
    "generate_binomial_stream",
    "generate_gaussian_stream",
]
