"""Permutation primitives: construction, shuffling, cycle induction and
cycle decomposition of aligned permutation pairs.

Permutations are 1-d ``numpy.int64`` arrays holding each of ``0..n-1``
exactly once.  Use :func:`as_key` when a hashable value is needed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numba as nb
import numpy as np


def as_permutation(p: Sequence[int] | np.ndarray) -> np.ndarray:
    """Validate ``p`` and return it as a fresh int64 array."""
    arr = np.array(p, dtype=np.int64).reshape(-1)
    if arr.size == 0:
        raise ValueError("a permutation must have length >= 1")
    if not is_permutation(arr):
        raise ValueError(f"not a permutation of 0..{arr.size - 1}: {arr.tolist()}")
    return arr


def is_permutation(p: Sequence[int] | np.ndarray) -> bool:
    arr = np.asarray(p)
    n = arr.size
    if n == 0 or arr.ndim != 1:
        return False
    if arr.min() < 0 or arr.max() >= n:
        return False
    return np.unique(arr).size == n


def as_key(p: Sequence[int] | np.ndarray) -> tuple[int, ...]:
    return tuple(int(x) for x in p)


def identity(n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be >= 1")
    return np.arange(n, dtype=np.int64)


def random_permutation(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniformly random permutation of ``0..n-1``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    p = np.arange(n, dtype=np.int64)
    _shuffle_inplace(p, rng)
    return p


def shuffle(indexes: Sequence[int] | np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Return a uniformly shuffled copy of ``indexes`` (Fisher-Yates)."""
    a = np.array(indexes, dtype=np.int64).reshape(-1)
    if a.size > 1:
        _shuffle_inplace(a, rng)
    return a


def create_cycle(p: Sequence[int] | np.ndarray, indexes: Sequence[int] | np.ndarray) -> np.ndarray:
    """Induce a cycle in ``p`` over the positions in ``indexes``.

    The result ``r`` satisfies ``r[indexes[i-1]] = p[indexes[i]]`` for
    ``i = 1..k-1`` and ``r[indexes[k-1]] = p[indexes[0]]``; every other
    position is unchanged.  ``p`` itself is not modified.

    >>> create_cycle([2, 6, 0, 5, 3, 8, 7, 9, 4, 1], [3, 7, 1, 4]).tolist()
    [2, 3, 0, 9, 5, 8, 7, 6, 4, 1]
    """
    r = as_permutation(p)
    idx = np.array(indexes, dtype=np.int64).reshape(-1)
    k = idx.size
    if k < 2:
        raise ValueError("a cycle needs at least 2 indexes")
    if idx.min() < 0 or idx.max() >= r.size:
        raise ValueError("cycle index out of range")
    if np.unique(idx).size != k:
        raise ValueError("cycle indexes must be distinct")
    _create_cycle(r, idx, k)
    return r


@dataclass(frozen=True)
class CycleDecomposition:
    """Cycles of the graph with an edge ``p1[i] -> p2[i]`` for each position."""

    cycles: tuple[tuple[int, ...], ...]
    cycle_count: int = field(init=False)
    fixed_point_count: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "cycle_count", len(self.cycles))
        object.__setattr__(self, "fixed_point_count", sum(1 for c in self.cycles if len(c) == 1))

    @property
    def lengths(self) -> list[int]:
        return sorted(len(c) for c in self.cycles)


def cycle_decomposition(p1: Sequence[int] | np.ndarray, p2: Sequence[int] | np.ndarray) -> CycleDecomposition:
    a, b = check_pair(p1, p2)
    succ = np.empty_like(a)
    succ[a] = b
    seen = np.zeros(a.size, dtype=bool)
    cycles = []
    for start in range(a.size):
        if seen[start]:
            continue
        cyc = []
        v = start
        while not seen[v]:
            seen[v] = True
            cyc.append(v)
            v = int(succ[v])
        cycles.append(tuple(cyc))
    return CycleDecomposition(tuple(cycles))


def check_pair(p1, p2) -> tuple[np.ndarray, np.ndarray]:
    a = as_permutation(p1)
    b = as_permutation(p2)
    if a.size != b.size:
        raise ValueError(f"length mismatch: {a.size} != {b.size}")
    return a, b


def cycle_lengths(p1, p2) -> np.ndarray:
    """Lengths of all cycles (singletons included) of an aligned pair."""
    a, b = check_pair(p1, p2)
    out = np.empty(a.size, dtype=np.int64)
    m = _cycle_lengths(a, b, out, np.empty(a.size, np.int64), np.empty(a.size, np.bool_))
    return out[:m]


def cycle_moves(n: int, kmax: int, kmin: int = 2) -> np.ndarray:
    """Every distinct cycle of length ``kmin..kmax`` over ``n`` positions.

    Row ``m`` is a position map: ``p[m]`` is ``p`` with that cycle induced.
    A cycle over a given index set has ``(k-1)!`` distinct orderings, so
    there are ``sum C(n,k) (k-1)!`` rows.
    """
    rows = []
    for k in range(max(kmin, 2), min(kmax, n) + 1):
        for subset in itertools.combinations(range(n), k):
            for rest in itertools.permutations(subset[1:]):
                order = (subset[0],) + rest
                m = list(range(n))
                for a, b in zip(order, order[1:] + order[:1]):
                    m[a] = b
                rows.append(m)
    if not rows:
        return np.empty((0, n), dtype=np.int64)
    return np.array(rows, dtype=np.int64)


# ---------------------------------------------------------------------------
# compiled kernels, shared by the mutation, distance and landscape modules
# ---------------------------------------------------------------------------

@nb.njit(cache=True)
def _shuffle_inplace(a, rng):
    for i in range(a.size - 1, 0, -1):
        j = rng.integers(0, i + 1)
        t = a[i]
        a[i] = a[j]
        a[j] = t


@nb.njit(cache=True)
def _create_cycle(p, idx, k):
    # loops over k, the cycle length, not the permutation length
    temp = p[idx[0]]
    for i in range(1, k):
        p[idx[i - 1]] = p[idx[i]]
    p[idx[k - 1]] = temp


@nb.njit(cache=True)
def _cycle_lengths(p1, p2, out, succ, seen):
    n = p1.size
    for i in range(n):
        succ[p1[i]] = p2[i]
        seen[i] = False
    m = 0
    for s in range(n):
        if seen[s]:
            continue
        c = 0
        v = s
        while not seen[v]:
            seen[v] = True
            v = succ[v]
            c += 1
        out[m] = c
        m += 1
    return m
