"""Permutation distance measures and landscape diameter formulas.

Cycle-based measures look at the cycle decomposition of the aligned pair:

* cycle distance: number of non-singleton cycles (a semi-metric)
* cycle edit distance: fewest induced cycles of any length, 0/1/2
* k-cycle distance: sum over cycles of ``ceil((c-1)/(k-1))``; a metric
  for k <= 4 and a semi-metric for k >= 5

plus the reference measures paired with the classical operators:
interchange (swap), reinsertion (insertion), exact match, cyclic edge
(reversal surrogate) and the trivial 0/1 distance (scramble).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numba as nb
import numpy as np

from .mutation import MutationOperator
from .permutation import _cycle_lengths, check_pair, cycle_moves, identity

CYCLE, CYCLE_EDIT, K_CYCLE, INTERCHANGE, REINSERTION, EXACT_MATCH, CYCLIC_EDGE, TRIVIAL = range(8)
KINDS = {
    "cycle": CYCLE,
    "cycle-edit": CYCLE_EDIT,
    "k-cycle": K_CYCLE,
    "interchange": INTERCHANGE,
    "reinsertion": REINSERTION,
    "exact-match": EXACT_MATCH,
    "cyclic-edge": CYCLIC_EDGE,
    "trivial": TRIVIAL,
}

# Largest n for which the Cycle(kmax >= 5) diameter is computed exactly.
EXACT_KMAX_DIAMETER_LIMIT = 10


@dataclass(frozen=True)
class DistanceMeasure:
    kind: str
    k: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown distance {self.kind!r}")
        if self.kind == "k-cycle" and (self.k is None or self.k < 2):
            raise ValueError("k-cycle distance needs k >= 2")

    @property
    def code(self) -> int:
        return KINDS[self.kind]

    @property
    def param(self) -> int:
        return int(self.k) if self.kind == "k-cycle" else 0

    @property
    def spec(self) -> str:
        return f"k-cycle:{self.k}" if self.kind == "k-cycle" else self.kind

    def __call__(self, p1, p2) -> int:
        a, b = check_pair(p1, p2)
        return int(_distance(self.code, self.param, a, b, _workspace(a.size)))

    def __str__(self):
        return self.spec


def parse_distance(spec: str) -> DistanceMeasure:
    name, _, arg = spec.strip().lower().partition(":")
    if name not in KINDS:
        raise ValueError(f"unknown distance {spec!r}")
    if name == "k-cycle":
        try:
            return DistanceMeasure(name, int(arg))
        except ValueError as exc:
            raise ValueError(f"bad distance spec {spec!r}: {exc}") from None
    if arg:
        raise ValueError(f"distance {name!r} takes no parameter")
    return DistanceMeasure(name)


def paired_distance(op: MutationOperator) -> DistanceMeasure:
    """The distance used to analyse landscapes of ``op``."""
    if op.kind == "cycle-kmax":
        return DistanceMeasure("k-cycle", op.kmax)
    return DistanceMeasure({
        "cycle-alpha": "cycle-edit",
        "swap": "interchange",
        "insertion": "reinsertion",
        "reversal": "cyclic-edge",
        "scramble": "trivial",
    }[op.kind])


def cycle_distance(p1, p2) -> int:
    return DistanceMeasure("cycle")(p1, p2)


def cycle_edit_distance(p1, p2) -> int:
    return DistanceMeasure("cycle-edit")(p1, p2)


def k_cycle_distance(p1, p2, k: int) -> int:
    return DistanceMeasure("k-cycle", k)(p1, p2)


def interchange_distance(p1, p2) -> int:
    return DistanceMeasure("interchange")(p1, p2)


def reinsertion_distance(p1, p2) -> int:
    return DistanceMeasure("reinsertion")(p1, p2)


def exact_match_distance(p1, p2) -> int:
    return DistanceMeasure("exact-match")(p1, p2)


def cyclic_edge_distance(p1, p2) -> int:
    """Undirected edges ``{p1[i], p1[i+1 mod n]}`` of ``p1`` missing from ``p2``."""
    return DistanceMeasure("cyclic-edge")(p1, p2)


def scramble_trivial_distance(p1, p2) -> int:
    return DistanceMeasure("trivial")(p1, p2)


# ---------------------------------------------------------------------------
# diameters
# ---------------------------------------------------------------------------

def diameter_formula(op: MutationOperator, n: int) -> int | float:
    """Diameter of the landscape induced by ``op`` on permutations of length n.

    Cycle(kmax) with ``kmax >= 5`` has no simple closed form because of
    parity effects; it is computed exactly by a search over cycle types
    for ``n <= EXACT_KMAX_DIAMETER_LIMIT`` and approximated by
    ``2n/kmax`` beyond that (a float is returned in that case).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return 0
    if op.kind in ("swap", "insertion", "reversal"):
        return n - 1
    if op.kind == "scramble":
        return 1
    if op.kind == "cycle-alpha" or op.kmax >= n:
        return _cycle_edit_diameter(n)
    if op.kmax <= 4:
        return max(n // 2, -(-(n - 1) // (op.kmax - 1)))
    if n <= EXACT_KMAX_DIAMETER_LIMIT:
        return cycle_type_diameter(n, op.kmax)
    return 2.0 * n / op.kmax


def distance_diameter(measure: DistanceMeasure, n: int) -> int:
    """Largest value ``measure`` takes over pairs of length-n permutations."""
    if n < 1:
        raise ValueError("n must be >= 1")
    kind = measure.kind
    if kind == "cycle":
        return n // 2
    if kind == "cycle-edit":
        return _cycle_edit_diameter(n)
    if kind == "k-cycle":
        return max(n // 2, -(-(n - 1) // (measure.k - 1)))
    if kind in ("interchange", "reinsertion"):
        return n - 1
    if kind == "exact-match":
        return n if n >= 2 else 0
    if kind == "cyclic-edge":
        # the complement of a 4-cycle has no Hamiltonian cycle
        if n <= 3:
            return 0
        return 2 if n == 4 else n
    return 1 if n >= 2 else 0


def _cycle_edit_diameter(n: int) -> int:
    if n <= 1:
        return 0
    return 1 if n <= 3 else 2


@lru_cache(maxsize=None)
def cycle_type_distances(n: int, kmax: int) -> dict[tuple[int, ...], int]:
    """Fewest cycles of length <= kmax whose product has each cycle type.

    The generating set is closed under conjugation, so the distance from
    the identity depends only on the cycle type; a BFS over the integer
    partitions of n therefore replaces a BFS over all n! permutations.
    """
    moves = cycle_moves(n, kmax)
    start = tuple([1] * n)
    dist = {start: 0}
    frontier = [start]
    while frontier:
        nxt = []
        for lam in frontier:
            reps = _class_representative(lam)[moves]
            for t in np.unique(_cycle_types(reps), axis=0):
                key = tuple(int(x) for x in t if x)
                if key not in dist:
                    dist[key] = dist[lam] + 1
                    nxt.append(key)
        frontier = nxt
    return dist


def cycle_type_diameter(n: int, kmax: int) -> int:
    return max(cycle_type_distances(n, kmax).values())


def approximate_kmax_diameter(n: int, kmax: int) -> float:
    return 2.0 * n / kmax


def _class_representative(lam: tuple[int, ...]) -> np.ndarray:
    p = np.empty(sum(lam), dtype=np.int64)
    s = 0
    for c in lam:
        for t in range(c):
            p[s + t] = s + (t + 1) % c
        s += c
    return p


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------

def _workspace(n: int) -> np.ndarray:
    return np.empty(5 * max(n, 1), dtype=np.int64)


@nb.njit(cache=True)
def _cycle_types(rows):
    m, n = rows.shape
    out = np.zeros((m, n), dtype=np.int64)
    ident = np.arange(n)
    lens = np.empty(n, np.int64)
    succ = np.empty(n, np.int64)
    seen = np.empty(n, np.bool_)
    for r in range(m):
        c = _cycle_lengths(ident, rows[r], lens, succ, seen)
        srt = np.sort(lens[:c])[::-1]
        out[r, :c] = srt
    return out


@nb.njit(cache=True)
def _distance(code, k, p1, p2, ws):
    """Distance ``code`` between ``p1`` and ``p2``; ``ws`` is int64 scratch of length 5n."""
    n = p1.size
    if code == EXACT_MATCH:
        c = 0
        for i in range(n):
            if p1[i] != p2[i]:
                c += 1
        return c
    if code == TRIVIAL:
        for i in range(n):
            if p1[i] != p2[i]:
                return 1
        return 0
    if code == REINSERTION or code == CYCLIC_EDGE:
        pos = ws[:n]
        for i in range(n):
            pos[p2[i]] = i
        if code == CYCLIC_EDGE:
            if n <= 2:
                return 0
            c = 0
            for i in range(n):
                j = i + 1
                if j == n:
                    j = 0
                d = abs(pos[p1[i]] - pos[p1[j]])
                if d != 1 and d != n - 1:
                    c += 1
            return c
        # n - longest common subsequence, via longest increasing subsequence
        tails = ws[n:2 * n]
        size = 0
        for i in range(n):
            x = pos[p1[i]]
            lo = 0
            hi = size
            while lo < hi:
                mid = (lo + hi) >> 1
                if tails[mid] < x:
                    lo = mid + 1
                else:
                    hi = mid
            tails[lo] = x
            if lo == size:
                size += 1
        return n - size
    lens = ws[:n]
    m = _cycle_lengths_ws(p1, p2, lens, ws[n:2 * n], ws[2 * n:3 * n])
    if code == INTERCHANGE:
        return n - m
    nontrivial = 0
    total = 0
    for t in range(m):
        c = lens[t]
        if c > 1:
            nontrivial += 1
            if code == K_CYCLE:
                total += (c - 1 + k - 2) // (k - 1)
    if code == CYCLE:
        return nontrivial
    if code == CYCLE_EDIT:
        return nontrivial if nontrivial < 2 else 2
    return total


@nb.njit(cache=True)
def _cycle_lengths_ws(p1, p2, out, succ, seen):
    # integer "seen" flags so a single int64 workspace suffices
    n = p1.size
    for i in range(n):
        succ[p1[i]] = p2[i]
        seen[i] = 0
    m = 0
    for s in range(n):
        if seen[s]:
            continue
        c = 0
        v = s
        while seen[v] == 0:
            seen[v] = 1
            v = succ[v]
            c += 1
        out[m] = c
        m += 1
    return m

