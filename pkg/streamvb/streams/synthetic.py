"""Synthetic drifting streams"""

import logging
from typing import List, Tuple

import numpy as np

from ..errors import InvalidParameterError
from ..rng import STREAM_DATA, keyed_rng
from .base import Batch, DriftSchedule, split_batch

logger = logging.getLogger(__name__)


def _probability(params) -> float:
    if len(params) != 1:
        raise InvalidParameterError(f"binomial segments take one parameter p, got {params}", "p")
    p = float(params[0])
    if not 0.0 < p < 1.0:
        raise InvalidParameterError(f"p must lie in (0, 1), got {p}", "p")
    return p


def generate_binomial_stream(sched: DriftSchedule) -> List[Batch]:
    """batch_size Bernoulli draws per step at the active segment's p"""
    probabilities = [_probability(segment.params) for segment in sched.segments]
    batches = []
    t = 0
    for segment, p in zip(sched.segments, probabilities):
        for _ in range(segment.num_steps):
            t += 1
            rng = keyed_rng(sched.seed, t, STREAM_DATA)
            rows = (rng.random(sched.batch_size) < p).astype(np.int64)
            batches.append(split_batch(t, rows, sched.seed, sched.split))
    logger.info(f"Generated binomial stream: {t} batches of {sched.batch_size}")
    return batches


def _components(params) -> List[Tuple[float, float, float]]:
    """(weight, mean, sd) triples from either (mean, sd) or a list of triples"""
    if len(params) == 2 and all(np.isscalar(v) for v in params):
        components = [(1.0, float(params[0]), float(params[1]))]
    else:
        components = []
        for component in params:
            if np.isscalar(component) or len(component) != 3:
                raise InvalidParameterError(
                    f"gaussian segments take (mean, sd) or (weight, mean, sd) triples, got {params}", "params"
                )
            components.append(tuple(float(v) for v in component))
    for weight, _, sd in components:
        if not sd > 0.0:
            raise InvalidParameterError(f"standard deviation must be positive, got {sd}", "sd")
        if not weight > 0.0:
            raise InvalidParameterError(f"mixture weight must be positive, got {weight}", "weight")
    total = sum(weight for weight, _, _ in components)
    return [(weight / total, mean, sd) for weight, mean, sd in components]


def generate_gaussian_stream(sched: DriftSchedule) -> List[Batch]:
    """Gaussian or Gaussian-mixture draws per step of the schedule"""
    segments = [_components(segment.params) for segment in sched.segments]
    batches = []
    t = 0
    for segment, components in zip(sched.segments, segments):
        weights = np.array([c[0] for c in components])
        means = np.array([c[1] for c in components])
        sds = np.array([c[2] for c in components])
        for _ in range(segment.num_steps):
            t += 1
            rng = keyed_rng(sched.seed, t, STREAM_DATA)
            labels = rng.choice(len(components), size=sched.batch_size, p=weights)
            rows = rng.normal(means[labels], sds[labels])
            batches.append(split_batch(t, rows, sched.seed, sched.split))
    logger.info(f"Generated gaussian stream: {t} batches of {sched.batch_size}")
    return batches
