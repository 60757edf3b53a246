"""Counter-based Gaussian sampling.

Every Monte Carlo estimator in this package draws its points through
:func:`gaussian_samples`.  Sample ``s`` in dimension ``d`` is a pure function
of ``(seed, d, s)``: it is produced from a fixed window of the Philox counter
stream, so any sharding of the sample range — serial, batched, or across
workers — yields bit-identical values.
"""

from functools import lru_cache

import numpy as np
from scipy.special import ndtri

# Philox-4x64 emits 4 uint64 words per counter tick.
_WORDS_PER_BLOCK = 4


def _blocks_per_sample(dim: int) -> int:
    return -(-dim // _WORDS_PER_BLOCK)


def gaussian_samples(seed: int, dim: int, start: int, count: int) -> np.ndarray:
    """Standard normal draws for samples [start, start+count) of stream (seed, dim).

    Returns a (count, dim) array.  Each sample owns a disjoint block range of
    the Philox counter keyed by ``seed``; uniforms are mapped through the
    inverse normal CDF, so no draw depends on how many came before it.
    """
    if count == 0:
        return np.empty((0, dim))
    bps = _blocks_per_sample(dim)
    gen = np.random.Generator(np.random.Philox(key=seed, counter=start * bps))
    # one 64-bit word per double keeps the counter arithmetic exact
    u = gen.random(count * bps * _WORDS_PER_BLOCK)
    u = u.reshape(count, bps * _WORDS_PER_BLOCK)[:, :dim]
    # random() returns [0, 1); nudge exact zeros into the open interval
    return ndtri(np.maximum(u, 2.0**-54))


@lru_cache(maxsize=8)
def _cached_block(seed: int, dim: int, count: int) -> np.ndarray:
    x = gaussian_samples(seed, dim, 0, count)
    x.flags.writeable = False
    return x


def shared_gaussian_samples(seed: int, dim: int, count: int) -> np.ndarray:
    """Like :func:`gaussian_samples` from sample 0, memoized and read-only.

    Sweeps reuse one fixed-seed point cloud across hundreds of instances;
    caching skips the repeated inverse-CDF work.
    """
    return _cached_block(seed, dim, count)
