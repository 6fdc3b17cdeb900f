"""Counter-based random streams

Every random draw in the library comes from a Philox generator keyed by a
tuple of integers, so a stream is reproducible from its key alone and does
not depend on the order in which other streams were consumed.
"""

import numpy as np

# Stream identifiers used as the last key component
STREAM_DATA = 0
STREAM_SPLIT = 1
STREAM_INIT = 2
STREAM_PREDICTIVE = 3


def keyed_rng(*key: int) -> np.random.Generator:
    """Return a generator for the given integer key, e.g. ``keyed_rng(seed, t, STREAM_DATA)``"""
    seq = np.random.SeedSequence([int(k) for k in key])
    return np.random.Generator(np.random.Philox(seq))
