"""Deterministic random streams and trial scheduling for Monte Carlo runs."""

from concurrent.futures import ThreadPoolExecutor

import numpy as np


def stream(seed, *path):
    """Independent counter-based generator keyed by ``(seed, *path)``.

    Philox streams derived from the same root seed but different integer
    paths are statistically independent, so parallel trials can each draw
    from their own stream and results do not depend on scheduling or on
    the number of worker threads.
    """
    key = np.random.SeedSequence((int(seed),) + tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(key))


def seed_path(seed):
    """Normalize an int or tuple-of-ints seed into a stream path."""
    if isinstance(seed, (tuple, list)):
        return tuple(int(s) for s in seed)
    return (int(seed),)


def map_trials(fn, n_trials, threads=1):
    """Apply fn to trial indices 0..n-1, optionally across worker threads.

    Results come back in index order, so any statistic computed from them is
    identical for every thread count (each trial must key its randomness by
    its own index).
    """
    if threads is None or threads <= 1:
        return [fn(i) for i in range(int(n_trials))]
    with ThreadPoolExecutor(max_workers=int(threads)) as pool:
        return list(pool.map(fn, range(int(n_trials))))
