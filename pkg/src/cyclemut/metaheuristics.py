"""(1+1)-EA and self-tuning simulated annealing over permutations.

Both algorithms count the initial evaluation as evaluation 1 and stop
after exactly ``budget`` cost evaluations.  Objectives exposing a
compiled ``kernel``/``data`` pair run entirely inside numba; any other
callable goes through an equivalent Python loop that consumes the random
stream identically.
"""

from __future__ import annotations

import math
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numba as nb
import numpy as np

from .mutation import MutationOperator, _mutate
from .permutation import _shuffle_inplace
from .problems import ProblemSpec, make_problem, parse_problem
from .tables import ExperimentTable, RunRecord

EMA_WEIGHT = 1.0 / 500.0
TEMPERATURE_STEP = 1.002
MIN_TEMPERATURE = 1e-300


@dataclass(frozen=True)
class RunConfig:
    budget: int
    snapshots: tuple[int, ...] = ()
    seed: int | None = None

    def __post_init__(self):
        if int(self.budget) != self.budget or self.budget < 1:
            raise ValueError("budget must be a positive integer")
        snaps = tuple(int(s) for s in self.snapshots) or (int(self.budget),)
        if any(b <= a for a, b in zip(snaps, snaps[1:])):
            raise ValueError("snapshots must be strictly ascending")
        if snaps[0] < 1 or snaps[-1] > self.budget:
            raise ValueError("snapshots must lie in [1, budget]")
        object.__setattr__(self, "budget", int(self.budget))
        object.__setattr__(self, "snapshots", snaps)


@dataclass(frozen=True)
class AnnealingState:
    temperature: float
    target_rate: float
    accept_rate: float
    eval_index: int


@dataclass
class RunTrace:
    best_at: dict[int, float]
    final_cost: float
    final_perm: np.ndarray
    evaluations: int
    accepted: int = 0
    worse_proposed: int = 0
    worse_accepted: int = 0
    annealing: AnnealingState | None = None
    extra: dict = field(default_factory=dict)


def lam_target_rate(t: int, budget: int) -> float:
    """Modified Lam target acceptance rate after ``t`` of ``budget`` evaluations."""
    return float(_lam_target(t / budget))


def _rng(cfg: RunConfig, rng):
    if rng is not None:
        return rng
    if cfg.seed is None:
        raise ValueError("a seed or a random generator is required")
    return np.random.default_rng(cfg.seed)


def _problem_size(cost, n):
    if n is None:
        n = getattr(cost, "n", None)
    if n is None:
        raise ValueError("permutation length n is required for plain cost callables")
    if n < 2:
        raise ValueError("n must be >= 2")
    return int(n)


def _compiled(cost):
    kernel = getattr(cost, "kernel", None)
    data = getattr(cost, "data", None)
    return (kernel, data) if kernel is not None and data is not None else None


def one_plus_one_ea(cost, op: MutationOperator, cfg: RunConfig, rng: np.random.Generator | None = None,
                    n: int | None = None) -> RunTrace:
    """(1+1)-EA: keep the child whenever its cost is no worse than the parent's."""
    rng = _rng(cfg, rng)
    n = _problem_size(cost, n)
    code, kmax, c1, c2 = op.kernel_args(n)
    snaps = np.array(cfg.snapshots, dtype=np.int64)
    best = np.empty(snaps.size)
    p = np.arange(n, dtype=np.int64)
    _shuffle_inplace(p, rng)
    compiled = _compiled(cost)
    if compiled is not None:
        counts = np.zeros(3, np.int64)
        final = _ea_loop(compiled[0], compiled[1], p, code, kmax, c1, c2, cfg.budget, snaps, rng, best, counts)
        return RunTrace(_snapshot_map(snaps, best), float(final), p, cfg.budget, accepted=int(counts[0]))

    idx = np.empty(n, np.int64)
    pool = np.empty(n, np.int64)
    cur = float(cost(p))
    accepted = 0
    s = _record(snaps, best, 0, 1, cur)
    child = p.copy()
    for e in range(2, cfg.budget + 1):
        child[:] = p
        _mutate(child, code, kmax, c1, c2, rng, idx, pool)
        c = float(cost(child))
        if c <= cur:
            p, child = child, p
            cur = c
            accepted += 1
        s = _record(snaps, best, s, e, cur)
    return RunTrace(_snapshot_map(snaps, best), cur, p, cfg.budget, accepted=accepted)


def simulated_annealing(cost, op: MutationOperator, cfg: RunConfig, rng: np.random.Generator | None = None,
                        n: int | None = None, fixed_temperature: float | None = None) -> RunTrace:
    """Simulated annealing with a Modified Lam self-tuning temperature.

    After every evaluation the temperature is multiplied by 1.002 when the
    smoothed acceptance rate is below the target trajectory and divided by
    1.002 otherwise.  ``fixed_temperature`` switches the tuning off, which
    is handy for probing the Metropolis rule on its own.
    """
    rng = _rng(cfg, rng)
    n = _problem_size(cost, n)
    if fixed_temperature is not None and not fixed_temperature > 0:
        raise ValueError("fixed_temperature must be positive")
    code, kmax, c1, c2 = op.kernel_args(n)
    snaps = np.array(cfg.snapshots, dtype=np.int64)
    best = np.empty(snaps.size)
    p = np.arange(n, dtype=np.int64)
    _shuffle_inplace(p, rng)
    best_perm = p.copy()
    fixed = float(fixed_temperature) if fixed_temperature is not None else 0.0
    compiled = _compiled(cost)
    counts = np.zeros(3, np.int64)
    state = np.zeros(3)
    if compiled is not None:
        final = _sa_loop(compiled[0], compiled[1], p, code, kmax, c1, c2, cfg.budget, snaps, rng, best,
                         best_perm, fixed, counts, state)
    else:
        final = _sa_python(cost, p, code, kmax, c1, c2, cfg.budget, snaps, rng, best, best_perm, fixed,
                           counts, state)
    annealing = AnnealingState(float(state[0]), float(state[1]), float(state[2]), cfg.budget)
    return RunTrace(_snapshot_map(snaps, best), float(final), best_perm, cfg.budget,
                    accepted=int(counts[0]), worse_proposed=int(counts[1]), worse_accepted=int(counts[2]),
                    annealing=annealing)


def _sa_python(cost, p, code, kmax, c1, c2, budget, snaps, rng, best_out, best_perm, fixed, counts, state):
    n = p.size
    idx = np.empty(n, np.int64)
    pool = np.empty(n, np.int64)
    cur = float(cost(p))
    best = cur
    temp = fixed if fixed > 0 else 0.5 * (abs(cur) + 1.0)
    rate = 0.5
    target = 1.0
    s = _record(snaps, best_out, 0, 1, best)
    child = p.copy()
    for e in range(2, budget + 1):
        child[:] = p
        _mutate(child, code, kmax, c1, c2, rng, idx, pool)
        c = float(cost(child))
        delta = c - cur
        if delta <= 0:
            accept = True
        else:
            counts[1] += 1
            accept = rng.random() < math.exp(-delta / temp)
            if accept:
                counts[2] += 1
        if accept:
            p, child = child, p
            cur = c
            counts[0] += 1
            if c < best:
                best = c
                best_perm[:] = p
        rate += ((1.0 if accept else 0.0) - rate) * EMA_WEIGHT
        target = _lam_target((e - 1) / budget)
        if fixed <= 0:
            temp = temp * TEMPERATURE_STEP if rate < target else max(temp / TEMPERATURE_STEP, MIN_TEMPERATURE)
        s = _record(snaps, best_out, s, e, best)
    state[0] = temp
    state[1] = target
    state[2] = rate
    return best


def _record(snaps, out, s, e, value):
    while s < snaps.size and snaps[s] == e:
        out[s] = value
        s += 1
    return s


def _snapshot_map(snaps, values) -> dict[int, float]:
    return {int(k): float(v) for k, v in zip(snaps, values)}


# ---------------------------------------------------------------------------
# batches
# ---------------------------------------------------------------------------

ALGORITHMS = {"ea": one_plus_one_ea, "sa": simulated_annealing}


def instance_seed(base_seed: int, run: int) -> int:
    """Seed of the instance shared by run ``run`` of every operator and budget."""
    return int(np.random.SeedSequence([base_seed, 0, run]).generate_state(1, np.uint64)[0])


def run_seed(base_seed: int, op: MutationOperator, budget: int, run: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([base_seed, 1, budget, zlib.crc32(op.spec.encode()), run])


def _run_cell(args) -> RunRecord:
    problem, algorithm, op, budget, run, base_seed = args
    iseed = instance_seed(base_seed, run)
    inst, _ = make_problem(problem, np.random.default_rng(iseed))
    rng = np.random.default_rng(run_seed(base_seed, op, budget, run))
    trace = ALGORITHMS[algorithm](inst, op, RunConfig(budget), rng)
    return RunRecord(problem.text, algorithm, op.spec, budget, run, iseed, trace.final_cost)


def run_batch(problem: ProblemSpec | str, operators: Sequence[MutationOperator], budgets: Sequence[int],
              runs: int, base_seed: int, algorithm: str = "ea", jobs: int = 1,
              progress: Callable[[RunRecord], None] | None = None) -> ExperimentTable:
    """Run every (operator, budget, run) cell; each budget is an independent run.

    Run ``r`` of every operator and budget shares one instance, so
    operator comparisons are paired.  Results are ordered by operator,
    budget and run regardless of ``jobs``.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    if not operators or not budgets:
        raise ValueError("at least one operator and one budget are required")
    if isinstance(problem, str):
        problem = parse_problem(problem)
    cells = [(problem, algorithm, op, int(b), r, base_seed)
             for op in operators for b in budgets for r in range(runs)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = []
            for rec in pool.map(_run_cell, cells, chunksize=max(1, len(cells) // (4 * jobs))):
                records.append(rec)
                if progress:
                    progress(rec)
    else:
        records = []
        for cell in cells:
            rec = _run_cell(cell)
            records.append(rec)
            if progress:
                progress(rec)
    return ExperimentTable(records)


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------

@nb.njit(cache=True)
def _lam_target(f):
    if f < 0.15:
        return 0.44 + 0.56 * 560.0 ** (-f / 0.15)
    if f < 0.65:
        return 0.44
    return 0.44 * 440.0 ** (-(f - 0.65) / 0.35)


@nb.njit(cache=True)
def _ea_loop(kernel, data, p, code, kmax, c1, c2, budget, snaps, rng, best_out, counts):
    n = p.size
    idx = np.empty(n, np.int64)
    pool = np.empty(n, np.int64)
    cur = kernel(p, data)
    s = 0
    while s < snaps.size and snaps[s] == 1:
        best_out[s] = cur
        s += 1
    child = p.copy()
    for e in range(2, budget + 1):
        child[:] = p
        _mutate(child, code, kmax, c1, c2, rng, idx, pool)
        c = kernel(child, data)
        if c <= cur:
            p[:] = child
            cur = c
            counts[0] += 1
        while s < snaps.size and snaps[s] == e:
            best_out[s] = cur
            s += 1
    return cur


@nb.njit(cache=True)
def _sa_loop(kernel, data, p, code, kmax, c1, c2, budget, snaps, rng, best_out, best_perm, fixed, counts, state):
    n = p.size
    idx = np.empty(n, np.int64)
    pool = np.empty(n, np.int64)
    cur = kernel(p, data)
    best = cur
    temp = fixed if fixed > 0 else 0.5 * (abs(cur) + 1.0)
    rate = 0.5
    target = 1.0
    s = 0
    while s < snaps.size and snaps[s] == 1:
        best_out[s] = best
        s += 1
    child = p.copy()
    for e in range(2, budget + 1):
        child[:] = p
        _mutate(child, code, kmax, c1, c2, rng, idx, pool)
        c = kernel(child, data)
        delta = c - cur
        accept = True
        if delta > 0:
            counts[1] += 1
            accept = rng.random() < math.exp(-delta / temp)
            if accept:
                counts[2] += 1
        if accept:
            p[:] = child
            cur = c
            counts[0] += 1
            if c < best:
                best = c
                best_perm[:] = p
            rate += (1.0 - rate) * EMA_WEIGHT
        else:
            rate -= rate * EMA_WEIGHT
        target = _lam_target((e - 1) / budget)
        if fixed <= 0:
            if rate < target:
                temp *= TEMPERATURE_STEP
            else:
                temp /= TEMPERATURE_STEP
                if temp < MIN_TEMPERATURE:
                    temp = MIN_TEMPERATURE
        while s < snaps.size and snaps[s] == e:
            best_out[s] = best
            s += 1
    state[0] = temp
    state[1] = target
    state[2] = rate
    return best
