"""Seed-derived random streams.

Every stochastic quantity in the package draws from a generator built by
`substream`, keyed by the user seed plus a structural path (trial index,
check index, ...). Distinct paths give statistically independent streams,
so results never depend on execution order or worker count.
"""

import numpy as np


def substream(seed: int, *path: int) -> np.random.Generator:
    """Return the generator for stream (seed, *path).

    Seeds and path elements must be nonnegative integers (seeds are read
    as unsigned 64-bit values).
    """
    entropy = [int(seed), *(int(p) for p in path)]
    if any(e < 0 for e in entropy):
        raise ValueError("seed and stream indices must be nonnegative")
    return np.random.default_rng(entropy)
