"""Shared fixtures: random in-domain parameters and the artificial drift stream"""

import numpy as np
import pytest

from streamvb.expfam import (
    BETA,
    GAMMA,
    NORMAL,
    NORMAL_GAMMA,
    NaturalParams,
    dirichlet,
    normal_known_precision,
)
from streamvb.streams import DriftSchedule, Segment, generate_binomial_stream

FAMILIES = {
    "beta": BETA,
    "dirichlet": dirichlet(3),
    "gamma": GAMMA,
    "normal_gamma": NORMAL_GAMMA,
    "normal": NORMAL,
    "normal_known_precision": normal_known_precision(2.0),
}


def random_params(family, rng: np.random.Generator) -> NaturalParams:
    """A random in-domain parameter with moderate standard hyperparameters"""
    name = family.family_id.value
    if name == "Beta":
        return NaturalParams.from_standard(family, alpha=rng.uniform(1.0, 20.0), beta=rng.uniform(1.0, 20.0))
    if name == "Dirichlet":
        return NaturalParams.from_standard(family, alpha=rng.uniform(1.0, 20.0, size=family.k))
    if name == "Gamma":
        return NaturalParams.from_standard(family, shape=rng.uniform(1.0, 20.0), rate=rng.uniform(0.2, 10.0))
    if name == "NormalGamma":
        return NaturalParams.from_standard(
            family, shape=rng.uniform(1.0, 20.0), rate=rng.uniform(0.2, 10.0),
            mu0=rng.uniform(-5.0, 5.0), kappa=rng.uniform(0.2, 10.0),
        )
    if name == "Normal":
        return NaturalParams.from_standard(family, mean=rng.uniform(-5.0, 5.0), precision=rng.uniform(0.2, 10.0))
    return NaturalParams.from_standard(family, mean=rng.uniform(-5.0, 5.0))


@pytest.fixture(params=sorted(FAMILIES))
def family(request):
    return FAMILIES[request.param]


def artificial_schedule(batch_size: int = 100, seed: int = 0, split: bool = False) -> DriftSchedule:
    """p = 0.2 for 30 steps, 0.5 for 30, 0.8 for 40"""
    return DriftSchedule(
        segments=[
            Segment(num_steps=30, params=[0.2]),
            Segment(num_steps=30, params=[0.5]),
            Segment(num_steps=40, params=[0.8]),
        ],
        batch_size=batch_size,
        seed=seed,
        split=split,
    )


def true_p(t: int) -> float:
    return 0.2 if t <= 30 else 0.5 if t <= 60 else 0.8


@pytest.fixture(scope="session")
def artificial_stream():
    return generate_binomial_stream(artificial_schedule())


@pytest.fixture(scope="session")
def artificial_stream_1000():
    return generate_binomial_stream(artificial_schedule(batch_size=1000))
