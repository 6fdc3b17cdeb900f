"""Batches and drift schedules"""

from dataclasses import dataclass
from typing import Any, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..rng import STREAM_SPLIT, keyed_rng

TEST_FRACTION = 1.0 / 3.0


@dataclass(frozen=True, eq=False)
class Batch:
    """One time slice: training observations x_t and held-out observations"""
    t: int
    train: np.ndarray
    test: np.ndarray
    key: Optional[Any] = None

    def __len__(self) -> int:
        return len(self.train) + len(self.test)


class Segment(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    num_steps: int = Field(ge=1)
    params: List[Any]


class DriftSchedule(BaseModel):
    """Piecewise-stationary generator parameters over time"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    segments: List[Segment] = Field(min_length=1)
    batch_size: int = Field(ge=1)
    seed: int = Field(0, ge=0)
    split: bool = False

    @property
    def num_steps(self) -> int:
        return sum(segment.num_steps for segment in self.segments)

    def params_at(self, t: int) -> List[Any]:
        """Generator parameters of time step t (1-based)"""
        end = 0
        for segment in self.segments:
            end += segment.num_steps
            if t <= end:
                return segment.params
        raise IndexError(f"time step {t} beyond schedule of {self.num_steps} steps")


def holdout_mask(seed: int, t: int, size: int) -> np.ndarray:
    """Rows whose seeded uniform draw is below 1/3 go to the test set

    The row with the largest draw always stays in training, so a non-empty
    batch never has an empty training part.
    """
    draws = keyed_rng(seed, t, STREAM_SPLIT).random(size)
    mask = draws < TEST_FRACTION
    if size and mask.all():
        mask[np.argmax(draws)] = False
    return mask


def split_batch(t: int, rows: np.ndarray, seed: int, split: bool, key: Any = None) -> Batch:
    if not split:
        return Batch(t=t, train=rows, test=rows[:0], key=key)
    mask = holdout_mask(seed, t, len(rows))
    return Batch(t=t, train=rows[~mask], test=rows[mask], key=key)
