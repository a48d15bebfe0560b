"""Named, independent random streams.

Every stream is a Philox-4x64 counter-based generator keyed by
``SeedSequence(seed, spawn_key=(stream_id,))``. Streams with different names
never overlap, so the channel dataset, the initial point, the sample
indices of the optimizer and the AN draws can be reproduced independently.
"""

import numpy as np

STREAMS = {
    "known": 0,  # frozen known channel parts (h_ab, h_jb_hat)
    "train": 1,  # dataset used by the objective
    "eval": 2,  # dataset used for performance evaluation
    "init": 3,  # initial point
    "sampling": 4,  # optimizer sample indices
    "an": 5,  # artificial noise coefficients
    "noise": 6,  # receiver noise in Monte Carlo checks
}


def make_rng(seed, stream):
    if stream not in STREAMS:
        raise KeyError(f"unknown random stream {stream!r}")
    ss = np.random.SeedSequence(int(seed), spawn_key=(STREAMS[stream],))
    return np.random.Generator(np.random.Philox(ss))


def complex_normal(rng, shape, var=1.0):
    """CN(0, var) draws: real and imaginary parts i.i.d. N(0, var / 2)."""
    std = np.sqrt(np.asarray(var, dtype=float) / 2.0)
    return std * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
