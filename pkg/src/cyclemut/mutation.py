"""Mutation operators for permutations.

Cycle mutation induces one random permutation cycle of length ``k``.
``Cycle(kmax)`` draws ``k`` uniformly from ``[2, kmax]``; ``Cycle(alpha)``
draws ``k`` from ``[2, n]`` with probability proportional to
``alpha**(k-2)`` by inverting the truncated geometric CDF.  Swap,
insertion, reversal and scramble are the usual baselines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numba as nb
import numpy as np

from .permutation import _create_cycle, _shuffle_inplace, as_permutation
from .sampling import _sample_into

CYCLE_KMAX, CYCLE_ALPHA, SWAP, INSERTION, REVERSAL, SCRAMBLE = range(6)
KINDS = {
    "cycle-kmax": CYCLE_KMAX,
    "cycle-alpha": CYCLE_ALPHA,
    "swap": SWAP,
    "insertion": INSERTION,
    "reversal": REVERSAL,
    "scramble": SCRAMBLE,
}


@dataclass(frozen=True)
class CycleLengthSampler:
    """Inverse-transform sampler of Cycle(alpha) cycle lengths for length ``n``."""

    alpha: float
    n: int

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must satisfy 0 < alpha < 1")
        if self.n < 2:
            raise ValueError("n must be >= 2")

    @property
    def c1(self) -> float:
        return 1.0 - self.alpha ** (self.n - 1)

    @property
    def c2(self) -> float:
        return math.log(self.alpha)

    def probability(self, k: int) -> float:
        if k < 2 or k > self.n:
            return 0.0
        a = self.alpha
        return a ** (k - 2) * (1.0 - a) / (1.0 - a ** (self.n - 1))

    def __call__(self, rng: np.random.Generator) -> int:
        return cycle_length_alpha(self, rng.random())


def cycle_length_alpha(sampler: CycleLengthSampler, u: float) -> int:
    if not 0.0 <= u < 1.0:
        raise ValueError("u must lie in [0, 1)")
    return int(_alpha_length(u, sampler.c1, sampler.c2, sampler.n))


def expected_cycle_length(alpha: float, n: int) -> float:
    """Mean Cycle(alpha) cycle length; bounded above by (2-alpha)/(1-alpha)."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must satisfy 0 < alpha < 1")
    if n < 2:
        raise ValueError("n must be >= 2")
    a = alpha
    num = 2.0 - a + n * a**n - n * a ** (n - 1) - a ** (n - 1)
    return num / ((1.0 - a) * (1.0 - a ** (n - 1)))


@dataclass(frozen=True)
class MutationOperator:
    """A named, parameterised permutation mutation.

    Calling the operator returns a mutated copy; the input is left alone.
    """

    kind: str
    kmax: int | None = None
    alpha: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown mutation operator {self.kind!r}")
        if self.kind == "cycle-kmax":
            if self.kmax is None or int(self.kmax) != self.kmax or self.kmax < 2:
                raise ValueError("Cycle(kmax) needs an integer kmax >= 2")
        elif self.kind == "cycle-alpha":
            if self.alpha is None or not 0.0 < self.alpha < 1.0:
                raise ValueError("Cycle(alpha) needs 0 < alpha < 1")

    @property
    def code(self) -> int:
        return KINDS[self.kind]

    @property
    def spec(self) -> str:
        if self.kind == "cycle-kmax":
            return f"cycle-kmax:{self.kmax}"
        if self.kind == "cycle-alpha":
            return f"cycle-alpha:{self.alpha:g}"
        return self.kind

    @property
    def label(self) -> str:
        if self.kind == "cycle-kmax":
            return f"Cycle({self.kmax})"
        if self.kind == "cycle-alpha":
            return f"Cycle({self.alpha:g})"
        return self.kind.capitalize()

    def kernel_args(self, n: int) -> tuple[int, int, float, float]:
        """``(code, kmax, c1, c2)`` as consumed by the compiled kernels."""
        if n < 2:
            raise ValueError("mutation needs a permutation of length >= 2")
        kmax = min(self.kmax, n) if self.kind == "cycle-kmax" else 0
        if self.kind == "cycle-alpha":
            s = CycleLengthSampler(self.alpha, n)
            return self.code, kmax, s.c1, s.c2
        return self.code, kmax, 0.0, 0.0

    def apply(self, p, rng: np.random.Generator) -> tuple[np.ndarray, int]:
        """Mutated copy plus the count reported by the kernel.

        For cycle mutation the count is the cycle length ``k``.
        """
        q = as_permutation(p)
        code, kmax, c1, c2 = self.kernel_args(q.size)
        k = _mutate(q, code, kmax, c1, c2, rng, np.empty(q.size, np.int64), np.empty(q.size, np.int64))
        return q, int(k)

    def __call__(self, p, rng: np.random.Generator) -> np.ndarray:
        return self.apply(p, rng)[0]

    def __str__(self):
        return self.spec


def parse_operator(spec: str) -> MutationOperator:
    """Parse ``cycle-kmax:K``, ``cycle-alpha:A``, ``swap``, ``insertion``,
    ``reversal`` or ``scramble`` (case-insensitive)."""
    text = spec.strip().lower()
    name, _, arg = text.partition(":")
    if name not in KINDS:
        raise ValueError(f"unknown mutation operator {spec!r}")
    if name == "cycle-kmax":
        try:
            return MutationOperator(name, kmax=int(arg))
        except ValueError as exc:
            raise ValueError(f"bad operator spec {spec!r}: {exc}") from None
    if name == "cycle-alpha":
        try:
            return MutationOperator(name, alpha=float(arg))
        except ValueError as exc:
            raise ValueError(f"bad operator spec {spec!r}: {exc}") from None
    if arg:
        raise ValueError(f"operator {name!r} takes no parameter")
    return MutationOperator(name)


def mutate_cycle_kmax(p, kmax: int, rng: np.random.Generator) -> np.ndarray:
    return MutationOperator("cycle-kmax", kmax=kmax)(p, rng)


def mutate_cycle_alpha(p, alpha: float, rng: np.random.Generator) -> np.ndarray:
    return MutationOperator("cycle-alpha", alpha=alpha)(p, rng)


def mutate_swap(p, rng: np.random.Generator) -> np.ndarray:
    return MutationOperator("swap")(p, rng)


def mutate_insertion(p, rng: np.random.Generator) -> np.ndarray:
    return MutationOperator("insertion")(p, rng)


def mutate_reversal(p, rng: np.random.Generator) -> np.ndarray:
    return MutationOperator("reversal")(p, rng)


def mutate_scramble(p, rng: np.random.Generator) -> np.ndarray:
    return MutationOperator("scramble")(p, rng)


def move_element(p: Sequence[int], i: int, j: int) -> np.ndarray:
    """Remove the element at position ``i`` and reinsert it so it ends at ``j``."""
    q = as_permutation(p)
    _move(q, i, j)
    return q


def reverse_segment(p: Sequence[int], i: int, j: int) -> np.ndarray:
    q = as_permutation(p)
    lo, hi = min(i, j), max(i, j)
    q[lo:hi + 1] = q[lo:hi + 1][::-1].copy()
    return q


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------

@nb.njit(cache=True)
def _alpha_length(u, c1, c2, n):
    k = 2 + int(math.floor(math.log(1.0 - c1 * u) / c2))
    # rounding can push u close to 1 past n
    if k > n:
        k = n
    return k


@nb.njit(cache=True)
def _two_positions(n, rng):
    i = rng.integers(0, n)
    j = rng.integers(0, n - 1)
    if j >= i:
        j += 1
    return i, j


@nb.njit(cache=True)
def _move(p, i, j):
    v = p[i]
    if i < j:
        for t in range(i, j):
            p[t] = p[t + 1]
    else:
        for t in range(i, j, -1):
            p[t] = p[t - 1]
    p[j] = v


@nb.njit(cache=True)
def _mutate(p, kind, kmax, c1, c2, rng, idx, pool):
    """Mutate ``p`` in place; ``idx`` and ``pool`` are scratch arrays of length n.

    Returns the cycle length for cycle mutation, 2 for swap, and the
    span of affected positions otherwise.
    """
    n = p.size
    if kind == CYCLE_KMAX or kind == CYCLE_ALPHA:
        if kind == CYCLE_KMAX:
            k = rng.integers(2, kmax + 1)
        else:
            k = _alpha_length(rng.random(), c1, c2, n)
        _sample_into(n, k, rng, idx, pool)
        for i in range(k - 1, 0, -1):
            j = rng.integers(0, i + 1)
            t = idx[i]
            idx[i] = idx[j]
            idx[j] = t
        _create_cycle(p, idx, k)
        return k
    i, j = _two_positions(n, rng)
    if kind == SWAP:
        t = p[i]
        p[i] = p[j]
        p[j] = t
        return 2
    if kind == INSERTION:
        _move(p, i, j)
        return abs(i - j) + 1
    lo = min(i, j)
    hi = max(i, j)
    if kind == REVERSAL:
        a = lo
        b = hi
        while a < b:
            t = p[a]
            p[a] = p[b]
            p[b] = t
            a += 1
            b -= 1
        return hi - lo + 1
    # scramble: reshuffle until the segment order actually changes
    m = hi - lo + 1
    for t in range(m):
        pool[t] = p[lo + t]
    seg = p[lo:hi + 1]
    while True:
        _shuffle_inplace(seg, rng)
        for t in range(m):
            if seg[t] != pool[t]:
                return m
