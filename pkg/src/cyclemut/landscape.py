"""Exhaustive and sampled analysis of permutation fitness landscapes.

* fitness distance correlation over all n! permutations
* exhaustive discovery of the optimal permutations
* exact one-mutation neighborhoods and BFS landscape diameters
* Monte-Carlo estimates of the mean distance moved by one mutation
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import numba as nb
import numpy as np

from .distances import CYCLE, CYCLE_EDIT, CYCLIC_EDGE, EXACT_MATCH, INTERCHANGE, K_CYCLE, REINSERTION, TRIVIAL
from .distances import DistanceMeasure, _distance
from .mutation import MutationOperator, _move, _mutate
from .permutation import _cycle_lengths, _shuffle_inplace, as_key, as_permutation, cycle_moves, identity
from .stats import PearsonAccumulator

EXHAUSTIVE_BOUND = 10


def _check_bound(n: int, bound: int) -> None:
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > bound:
        raise ValueError(f"n={n} exceeds the exhaustive bound {bound}")


def enumerate_permutations(n: int, bound: int = EXHAUSTIVE_BOUND) -> Iterator[np.ndarray]:
    """Every permutation of ``0..n-1`` once, in lexicographic order."""
    _check_bound(n, bound)
    for t in itertools.permutations(range(n)):
        yield np.array(t, dtype=np.int64)


def _kernel_of(obj):
    kernel = getattr(obj, "kernel", None)
    data = getattr(obj, "data", None)
    if kernel is None or data is None:
        return None
    return kernel, data


def _all_values(obj, n: int) -> np.ndarray:
    """Objective value of every permutation, in lexicographic order."""
    compiled = _kernel_of(obj)
    if compiled is not None:
        out = np.empty(math.factorial(n), dtype=np.float64)
        _values_kernel(compiled[0], compiled[1], n, out)
        return out
    return np.fromiter((float(obj(p)) for p in enumerate_permutations(n, n)), dtype=np.float64,
                       count=math.factorial(n))


def exhaustive_optima(cost, n: int, minimize: bool = True, rel_tol: float = 1e-9,
                      bound: int = EXHAUSTIVE_BOUND) -> np.ndarray:
    """All permutations attaining the best value, as rows in lexicographic order.

    Values within ``rel_tol`` (relative to the best) count as ties, which
    absorbs floating point noise in Euclidean tour lengths.
    """
    _check_bound(n, bound)
    values = _all_values(cost, n)
    best = values.min() if minimize else values.max()
    tol = rel_tol * max(1.0, abs(best))
    hits = np.flatnonzero(np.abs(values - best) <= tol)
    return _unrank_lex(hits, n)


def _unrank_lex(ranks: np.ndarray, n: int) -> np.ndarray:
    out = np.empty((ranks.size, n), dtype=np.int64)
    for r, rank in enumerate(ranks):
        rest = list(range(n))
        rank = int(rank)
        for i in range(n):
            f = math.factorial(n - 1 - i)
            q, rank = divmod(rank, f)
            out[r, i] = rest.pop(q)
    return out


@dataclass(frozen=True)
class FdcReport:
    operator: str
    distance: str
    r: float
    permutations_evaluated: int
    optima_count: int


def fdc(cost_or_fitness, optima, distance: DistanceMeasure, n: int, problem_sense: str = "minimize",
        operator: str = "", bound: int = EXHAUSTIVE_BOUND) -> FdcReport:
    """Correlation between objective value and distance to the nearest optimum.

    The raw value is correlated as given: cost for minimisation (positive r
    means easier) and fitness for maximisation (negative r means easier).
    """
    return fdc_many(cost_or_fitness, optima, [distance], n, problem_sense, [operator], bound)[0]


def fdc_many(cost_or_fitness, optima, distances: Sequence[DistanceMeasure], n: int,
             problem_sense: str = "minimize", operators: Sequence[str] | None = None,
             bound: int = EXHAUSTIVE_BOUND) -> list[FdcReport]:
    """:func:`fdc` for several distances in a single pass over S_n."""
    if problem_sense not in ("minimize", "maximize"):
        raise ValueError("problem_sense must be 'minimize' or 'maximize'")
    _check_bound(n, bound)
    opt = np.array([as_permutation(o) for o in (optima.tolist() if isinstance(optima, np.ndarray) else optima)],
                   dtype=np.int64).reshape(-1, n) if len(optima) else np.empty((0, n), np.int64)
    if opt.shape[0] == 0:
        raise ValueError("fdc needs at least one optimum")
    if not distances:
        raise ValueError("fdc needs at least one distance")
    operators = list(operators) if operators is not None else [""] * len(distances)
    if len(operators) != len(distances):
        raise ValueError("one operator label per distance is required")
    codes = np.array([d.code for d in distances], dtype=np.int64)
    params = np.array([d.param for d in distances], dtype=np.int64)
    values = _all_values(cost_or_fitness, n)
    # the enumeration splits into n lexicographic blocks by first element;
    # per-block accumulators are merged in a fixed order
    block = math.factorial(n - 1)
    accs = [PearsonAccumulator() for _ in distances]
    for first in range(n):
        state = np.zeros((len(distances), 6), dtype=np.float64)
        _fdc_block(n, first, values[first * block:(first + 1) * block], opt, codes, params, state)
        for j in range(len(distances)):
            accs[j] = accs[j].merge(PearsonAccumulator(*state[j]))
    reports = []
    for j, d in enumerate(distances):
        try:
            r = accs[j].correlation()
        except ValueError as exc:
            raise ValueError(f"fdc undefined for distance {d.spec}: {exc}") from None
        reports.append(FdcReport(operators[j], d.spec, max(-1.0, min(1.0, r)), accs[j].count, opt.shape[0]))
    return reports


# ---------------------------------------------------------------------------
# neighborhoods, diameters and landscape calculus
# ---------------------------------------------------------------------------

def neighborhood_moves(op: MutationOperator, n: int) -> np.ndarray:
    """Position maps ``m`` such that the neighbors of ``p`` are ``p[m]``.

    Rows are distinct and exclude the identity map.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return np.empty((0, 1), dtype=np.int64)
    base = identity(n)
    if op.kind == "cycle-kmax":
        return cycle_moves(n, op.kmax)
    if op.kind == "cycle-alpha":
        return cycle_moves(n, n)
    rows = []
    if op.kind == "swap":
        for i, j in itertools.combinations(range(n), 2):
            m = base.copy()
            m[i], m[j] = j, i
            rows.append(m)
    elif op.kind == "insertion":
        for i, j in itertools.permutations(range(n), 2):
            m = base.copy()
            _move(m, i, j)
            rows.append(m)
    elif op.kind == "reversal":
        for i, j in itertools.combinations(range(n), 2):
            m = base.copy()
            m[i:j + 1] = m[i:j + 1][::-1].copy()
            rows.append(m)
    else:
        # a scramble of the whole array reaches every other permutation
        if n > 8:
            raise ValueError("scramble neighborhoods are enumerated only for n <= 8")
        rows = [np.array(t, dtype=np.int64) for t in itertools.permutations(range(n))]
    moves = np.unique(np.array(rows, dtype=np.int64), axis=0)
    return moves[np.any(moves != base, axis=1)]


class NeighborhoodEnumerator:
    """Exact one-mutation neighbor sets for a fixed operator and length."""

    def __init__(self, op: MutationOperator, n: int):
        self.op = op
        self.n = n
        self.moves = neighborhood_moves(op, n)

    def __call__(self, p) -> frozenset[tuple[int, ...]]:
        q = as_permutation(p)
        if q.size != self.n:
            raise ValueError(f"expected length {self.n}, got {q.size}")
        return frozenset(as_key(row) for row in q[self.moves])


def neighborhood(op: MutationOperator, p) -> frozenset[tuple[int, ...]]:
    q = as_permutation(p)
    return NeighborhoodEnumerator(op, q.size)(q)


def bfs_eccentricity(op: MutationOperator, n: int, start=None) -> int:
    """Largest BFS distance from ``start`` (default identity) in the neighborhood graph."""
    if n > 7:
        raise ValueError("BFS diameters are computed only for n <= 7")
    s = identity(n) if start is None else as_permutation(start)
    if s.size != n:
        raise ValueError("start has the wrong length")
    if n == 1:
        return 0
    moves = neighborhood_moves(op, n)
    ecc, reached = _bfs(s, moves)
    if reached != math.factorial(n):
        raise RuntimeError(f"{op.spec} neighborhood graph on n={n} is disconnected: "
                           f"{reached} of {math.factorial(n)} permutations reachable")
    return int(ecc)


def bfs_diameter(op: MutationOperator, n: int) -> int:
    """Diameter of the neighborhood graph.

    Every neighborhood is a fixed set of position maps, so the graph is
    vertex-transitive and the identity's eccentricity is the diameter.
    """
    return bfs_eccentricity(op, n)


@dataclass(frozen=True)
class DeltaEstimate:
    mean: float
    variance: float
    samples: int


def landscape_delta_stats(op: MutationOperator, distance: DistanceMeasure, n: int, samples: int,
                          rng: np.random.Generator) -> DeltaEstimate:
    """Mean and variance of ``distance(p, mutate(p))`` over uniform random ``p``."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    code, kmax, c1, c2 = op.kernel_args(n)
    total, total_sq = _delta_kernel(n, samples, code, kmax, c1, c2, distance.code, distance.param, rng)
    mean = total / samples
    var = max(0.0, total_sq / samples - mean * mean) if samples > 1 else 0.0
    return DeltaEstimate(mean, var * samples / (samples - 1) if samples > 1 else 0.0, samples)


def landscape_delta(op: MutationOperator, distance: DistanceMeasure, n: int, samples: int,
                    rng: np.random.Generator) -> float:
    return landscape_delta_stats(op, distance, n, samples, rng).mean


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------

@nb.njit(cache=True)
def _next_permutation(a, lo):
    """Advance ``a[lo:]`` to its next lexicographic order; False when exhausted."""
    n = a.size
    i = n - 2
    while i >= lo and a[i] >= a[i + 1]:
        i -= 1
    if i < lo:
        return False
    j = n - 1
    while a[j] <= a[i]:
        j -= 1
    t = a[i]
    a[i] = a[j]
    a[j] = t
    a[i + 1:] = a[i + 1:][::-1].copy()
    return True


@nb.njit(cache=True)
def _values_kernel(kernel, data, n, out):
    p = np.arange(n)
    t = 0
    while True:
        out[t] = kernel(p, data)
        t += 1
        if not _next_permutation(p, 0):
            break


@nb.njit(cache=True)
def _fdc_block(n, first, values, optima, codes, params, state):
    """Accumulate (value, dmin) co-moments for permutations starting with ``first``.

    ``state[j]`` holds count, means, second moments and co-moment for
    distance ``j``.  Cycle lengths and position maps are computed once per
    (permutation, optimum) pair and shared by all requested distances.
    """
    nd = codes.size
    m = optima.shape[0]
    p = np.empty(n, np.int64)
    p[0] = first
    t = 1
    for v in range(n):
        if v != first:
            p[t] = v
            t += 1
    need_cycles = False
    need_pos = False
    for j in range(nd):
        c = codes[j]
        if c == CYCLE or c == CYCLE_EDIT or c == K_CYCLE or c == INTERCHANGE:
            need_cycles = True
        if c == REINSERTION or c == CYCLIC_EDGE:
            need_pos = True
    lens = np.empty(n, np.int64)
    succ = np.empty(n, np.int64)
    seen = np.empty(n, np.bool_)
    pos = np.empty(n, np.int64)
    tails = np.empty(n, np.int64)
    dmin = np.empty(nd, np.int64)
    count = 0
    mean_x = 0.0
    m2x = 0.0
    mean_y = np.zeros(nd)
    m2y = np.zeros(nd)
    cxy = np.zeros(nd)
    t = 0
    while True:
        for j in range(nd):
            dmin[j] = n + 1
        for o in range(m):
            opt = optima[o]
            ncyc = 0
            if need_cycles:
                ncyc = _cycle_lengths(p, opt, lens, succ, seen)
            if need_pos:
                for i in range(n):
                    pos[opt[i]] = i
            for j in range(nd):
                c = codes[j]
                d = 0
                if c == EXACT_MATCH or c == TRIVIAL:
                    for i in range(n):
                        if p[i] != opt[i]:
                            d += 1
                    if c == TRIVIAL and d > 0:
                        d = 1
                elif c == INTERCHANGE:
                    d = n - ncyc
                elif c == CYCLE or c == CYCLE_EDIT or c == K_CYCLE:
                    k = params[j]
                    for s in range(ncyc):
                        if lens[s] > 1:
                            if c == K_CYCLE:
                                d += (lens[s] - 1 + k - 2) // (k - 1)
                            else:
                                d += 1
                    if c == CYCLE_EDIT and d > 2:
                        d = 2
                elif c == CYCLIC_EDGE:
                    if n > 2:
                        for i in range(n):
                            i2 = i + 1
                            if i2 == n:
                                i2 = 0
                            gap = abs(pos[p[i]] - pos[p[i2]])
                            if gap != 1 and gap != n - 1:
                                d += 1
                else:
                    size = 0
                    for i in range(n):
                        x = pos[p[i]]
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
                    d = n - size
                if d < dmin[j]:
                    dmin[j] = d
        x = values[t]
        t += 1
        count += 1
        dx = x - mean_x
        mean_x += dx / count
        m2x += dx * (x - mean_x)
        for j in range(nd):
            y = float(dmin[j])
            dy = y - mean_y[j]
            mean_y[j] += dy / count
            m2y[j] += dy * (y - mean_y[j])
            cxy[j] += dx * (y - mean_y[j])
        if not _next_permutation(p, 1):
            break
    for j in range(nd):
        state[j, 0] = count
        state[j, 1] = mean_x
        state[j, 2] = mean_y[j]
        state[j, 3] = m2x
        state[j, 4] = m2y[j]
        state[j, 5] = cxy[j]


@nb.njit(cache=True)
def _bfs(start, moves):
    n = start.size
    size = 1
    for i in range(n):
        size *= n
    dist = np.full(size, -1, np.int8)
    total = 1
    for i in range(n):
        total *= i + 1
    queue = np.empty((total, n), np.int64)
    queue[0] = start
    code = 0
    for i in range(n - 1, -1, -1):
        code = code * n + start[i]
    dist[code] = 0
    head = 0
    tail = 1
    ecc = 0
    q = np.empty(n, np.int64)
    while head < tail:
        p = queue[head]
        dp = _dist_of(p, dist, n)
        head += 1
        for r in range(moves.shape[0]):
            code = 0
            for i in range(n - 1, -1, -1):
                q[i] = p[moves[r, i]]
                code = code * n + q[i]
            if dist[code] < 0:
                dist[code] = dp + 1
                if dp + 1 > ecc:
                    ecc = dp + 1
                queue[tail] = q
                tail += 1
    return ecc, tail


@nb.njit(cache=True)
def _dist_of(p, dist, n):
    code = 0
    for i in range(n - 1, -1, -1):
        code = code * n + p[i]
    return dist[code]


@nb.njit(cache=True)
def _delta_kernel(n, samples, code, kmax, c1, c2, dcode, dparam, rng):
    p = np.arange(n)
    q = np.empty(n, np.int64)
    idx = np.empty(n, np.int64)
    pool = np.empty(n, np.int64)
    ws = np.empty(5 * n, np.int64)
    total = 0.0
    total_sq = 0.0
    for s in range(samples):
        _shuffle_inplace(p, rng)
        q[:] = p
        _mutate(q, code, kmax, c1, c2, rng, idx, pool)
        d = float(_distance(dcode, dparam, p, q, ws))
        total += d
        total_sq += d * d
    return total, total_sq
