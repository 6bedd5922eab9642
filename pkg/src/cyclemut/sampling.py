"""Random k-subsets of ``0..n-1`` without replacement.

Three samplers with different cost profiles, and :func:`sample`, which
routes to whichever needs the fewest random numbers:

* ``k >= n/2``           reservoir sampling, O(n) time, n-k draws
* ``sqrt(n) <= k < n/2`` pool sampling, O(n) time, k draws
* ``k < sqrt(n)``        insertion sampling, O(k^2) time, k draws
"""

from __future__ import annotations

import numba as nb
import numpy as np

RESERVOIR, POOL, INSERTION = 0, 1, 2
SAMPLER_NAMES = {RESERVOIR: "reservoir", POOL: "pool", INSERTION: "insertion"}


def _check(n: int, k: int) -> None:
    if n < 1:
        raise ValueError("n must be >= 1")
    if k < 0 or k > n:
        raise ValueError(f"k must be in [0, n], got k={k}, n={n}")


def insertion_sample(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """Sorted uniform k-subset built by insertion into a sorted buffer."""
    _check(n, k)
    out = np.empty(k, dtype=np.int64)
    _insertion_sample(n, k, rng, out)
    return out


def pool_sample(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    _check(n, k)
    out = np.empty(k, dtype=np.int64)
    _pool_sample(n, k, rng, out, np.empty(n, dtype=np.int64))
    return out


def reservoir_sample(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    _check(n, k)
    out = np.empty(k, dtype=np.int64)
    _reservoir_sample(n, k, rng, out)
    return out


def choose_sampler(n: int, k: int) -> str:
    """Name of the sampler :func:`sample` uses for ``(n, k)``."""
    _check(n, k)
    return SAMPLER_NAMES[_route(n, k)]


def sample(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    route = choose_sampler(n, k)
    if route == "reservoir":
        return reservoir_sample(n, k, rng)
    if route == "pool":
        return pool_sample(n, k, rng)
    return insertion_sample(n, k, rng)


@nb.njit(cache=True)
def _route(n, k):
    # integer comparisons: 2k >= n  <=>  k >= n/2,  k*k >= n  <=>  k >= sqrt(n)
    if 2 * k >= n:
        return RESERVOIR
    if k * k >= n:
        return POOL
    return INSERTION


@nb.njit(cache=True)
def _insertion_sample(n, k, rng, result):
    for i in range(k):
        v = rng.integers(0, n - i)
        j = k - i
        while j < k and v >= result[j]:
            v += 1
            result[j - 1] = result[j]
            j += 1
        result[j - 1] = v


@nb.njit(cache=True)
def _pool_sample(n, k, rng, result, pool):
    for i in range(n):
        pool[i] = i
    remaining = n
    for i in range(k):
        j = rng.integers(0, remaining)
        result[i] = pool[j]
        remaining -= 1
        pool[j] = pool[remaining]


@nb.njit(cache=True)
def _reservoir_sample(n, k, rng, result):
    for i in range(k):
        result[i] = i
    for t in range(k, n):
        j = rng.integers(0, t + 1)
        if j < k:
            result[j] = t


@nb.njit(cache=True)
def _sample_into(n, k, rng, result, pool):
    """Fill ``result[:k]``; ``pool`` is scratch space of length >= n."""
    route = _route(n, k)
    if route == RESERVOIR:
        _reservoir_sample(n, k, rng, result)
    elif route == POOL:
        _pool_sample(n, k, rng, result, pool)
    else:
        _insertion_sample(n, k, rng, result)
