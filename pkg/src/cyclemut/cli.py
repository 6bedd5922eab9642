"""Command line harness: landscape tables, experiments and instance files.

Exit codes: 0 success, 2 usage error, 3 runtime or numeric error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import contextlib
import sys
import zlib
from typing import Sequence

import numpy as np

from . import __version__
from .distances import diameter_formula, paired_distance, parse_distance
from .landscape import bfs_diameter, exhaustive_optima, fdc_many, landscape_delta_stats
from .metaheuristics import run_batch
from .mutation import MutationOperator, parse_operator
from .problems import (format_instance, isomorphic_lcs_instance, make_problem, parse_problem, petersen_graph,
                       qap_planted_instance, tsp_circle_instance)
from .tables import write_csv

FDC_OPS = "cycle-alpha:0.5,cycle-kmax:5,cycle-kmax:4,cycle-kmax:3,swap,insertion,reversal,scramble"
DIAMETER_OPS = "cycle-alpha:0.5,cycle-kmax:2,cycle-kmax:3,cycle-kmax:4,cycle-kmax:5,swap,insertion,reversal,scramble"
CALCULUS_OPS = "cycle-alpha:0.25,cycle-alpha:0.5,cycle-alpha:0.75,cycle-kmax:3,cycle-kmax:4,cycle-kmax:5," \
               "swap,insertion,reversal,scramble"
EXPERIMENT_OPS = "cycle-alpha:0.25,cycle-alpha:0.5,cycle-alpha:0.75,cycle-kmax:3,cycle-kmax:4,cycle-kmax:5," \
                 "swap,insertion,reversal,scramble"
MAX_BFS_N = 7


class UsageError(Exception):
    pass


def parse_ops(text: str) -> list[MutationOperator]:
    try:
        ops = [parse_operator(s) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not ops:
        raise UsageError("no operators given")
    return ops


def parse_budgets(text: str) -> list[int]:
    """``1e2..1e7`` expands to consecutive powers of ten; otherwise a comma list."""
    try:
        if ".." in text:
            lo, hi = (float(x) for x in text.split(".."))
            a, b = np.log10(lo), np.log10(hi)
            if a != round(a) or b != round(b) or b < a:
                raise ValueError
            budgets = [10 ** e for e in range(int(round(a)), int(round(b)) + 1)]
        else:
            budgets = [int(float(x)) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad budget list {text!r}") from None
    if not budgets or min(budgets) < 1:
        raise UsageError("budgets must be positive")
    return budgets


def _require_seed(args, what: str) -> int:
    if args.seed is None:
        raise UsageError(f"{what} is randomized; pass --seed")
    return args.seed


def _provenance(command: str, **items) -> dict[str, str]:
    prov = {"command": command}
    prov.update({k: str(v) for k, v in items.items() if v is not None})
    prov["version"] = f"v{__version__}"
    return prov


@contextlib.contextmanager
def _output(path: str | None):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _spec_rng(seed: int, *parts: str) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed] + [zlib.crc32(p.encode()) for p in parts]))


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_fdc(args) -> int:
    ops = parse_ops(args.ops)
    if args.problem == "tsp-circle":
        cost, optima = tsp_circle_instance(10, 10.0, rounded=True)
        sense, value = "minimize", cost
    elif args.problem == "qap-planted":
        seed = _require_seed(args, "qap-planted")
        cost, planted = qap_planted_instance(10, np.random.default_rng(seed))
        sense, value, optima = "minimize", cost, planted.reshape(1, -1)
    else:
        inst, _ = isomorphic_lcs_instance(petersen_graph(), None)
        value = inst.fitness_objective()
        sense = "maximize"
        optima = exhaustive_optima(value, 10, minimize=False)
    if args.problem == "tsp-circle":
        found = exhaustive_optima(cost, 10)
        if found.shape != optima.shape or not np.array_equal(found, optima):
            raise RuntimeError("circle TSP optima do not match the expected 20 tours")
    reports = fdc_many(value, optima, [paired_distance(op) for op in ops], 10, sense, [op.spec for op in ops])
    rows = [(args.problem, r.operator, r.distance, r.r, r.optima_count, r.permutations_evaluated)
            for r in reports]
    with _output(args.out) as out:
        write_csv(out, "fdc/1", _provenance("fdc", problem=args.problem, sense=sense, seed=args.seed),
                  ["problem", "operator", "distance", "r", "optima_count", "permutations_evaluated"], rows)
    return 0


def cmd_diameter(args) -> int:
    if not 1 <= args.nmax <= MAX_BFS_N:
        raise UsageError(f"--nmax must lie in [1, {MAX_BFS_N}]")
    ops = parse_ops(args.ops)
    rows = []
    for op in ops:
        for n in range(max(1, args.nmin), args.nmax + 1):
            formula = diameter_formula(op, n)
            bfs = bfs_diameter(op, n)
            rows.append((op.spec, n, formula, bfs, int(formula == bfs)))
    with _output(args.out) as out:
        write_csv(out, "diameter/1", _provenance("diameter", nmin=args.nmin, nmax=args.nmax),
                  ["operator", "n", "formula", "bfs", "match"], rows)
    return 0


def calculus_formulas(op: MutationOperator, n: int) -> tuple[float, float, float]:
    """Closed-form (low, high) mean exact-match change and mean cyclic-edge change."""
    if op.kind == "cycle-alpha":
        a = op.alpha
        em = (2 - a) / (1 - a)
        return em, em, 2 * em
    if op.kind == "cycle-kmax":
        return (op.kmax + 2) / 2, (op.kmax + 2) / 2, float(op.kmax + 2)
    if op.kind == "swap":
        return 2.0, 2.0, 4.0
    if op.kind == "insertion":
        return (n + 4) / 3, (n + 4) / 3, 3.0
    if op.kind == "reversal":
        return (n + 1) / 3, (n + 4) / 3, 2.0
    return (n + 1) / 3, (n + 1) / 3, (n + 1) / 3


def cmd_calculus(args) -> int:
    seed = _require_seed(args, "calculus")
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    if args.n < 2:
        raise UsageError("--n must be >= 2")
    ops = parse_ops(args.ops)
    em, ce = parse_distance("exact-match"), parse_distance("cyclic-edge")
    rows = []
    for op in ops:
        e = landscape_delta_stats(op, em, args.n, args.samples, _spec_rng(seed, op.spec, em.spec))
        c = landscape_delta_stats(op, ce, args.n, args.samples, _spec_rng(seed, op.spec, ce.spec))
        lo, hi, f_ce = calculus_formulas(op, args.n)
        rows.append((op.spec, args.n, args.samples, e.mean, e.variance, lo, hi, c.mean, c.variance, f_ce))
    with _output(args.out) as out:
        write_csv(out, "calculus/1", _provenance("calculus", n=args.n, samples=args.samples, seed=seed),
                  ["operator", "n", "samples", "delta_em", "var_em", "formula_em_low", "formula_em_high",
                   "delta_ce", "var_ce", "formula_ce"], rows)
    return 0


def cmd_experiment(args) -> int:
    seed = _require_seed(args, "experiment")
    try:
        problem = parse_problem(args.problem)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    ops = parse_ops(args.ops)
    budgets = parse_budgets(args.budgets)
    if args.runs < 1:
        raise UsageError("--runs must be >= 1")
    if args.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    table = run_batch(problem, ops, budgets, args.runs, seed, args.algorithm, args.jobs)
    prov = _provenance("experiment", algorithm=args.algorithm, problem=problem.text,
                       operators=",".join(op.spec for op in ops), budgets=",".join(map(str, budgets)),
                       runs=args.runs, seed=seed)
    stem = f"{args.algorithm}_{problem.name}"
    for path in table.write_all(args.out, prov, stem):
        print(path)
    return 0


def cmd_gen_instance(args) -> int:
    try:
        spec = parse_problem(args.problem)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rng = np.random.default_rng(_require_seed(args, spec.name)) if spec.randomized else None
    inst, extras = make_problem(spec, rng)
    if spec.name in ("lcs-gpetersen", "lcs-random") and args.graph_only:
        inst, extras = inst.g1, {}
    comments = [f"generator={spec.text}", f"seed={args.seed}", f"version=v{__version__}"]
    text = format_instance(inst, extras, comments)
    with _output(args.out) as out:
        out.write(text)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cyclemut", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fdc", help="exhaustive fitness distance correlation at n=10")
    p.add_argument("problem", choices=["tsp-circle", "qap-planted", "lcs-petersen"])
    p.add_argument("--ops", default=FDC_OPS)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_fdc)

    p = sub.add_parser("diameter", help="closed-form vs BFS landscape diameters")
    p.add_argument("--nmax", type=int, default=7)
    p.add_argument("--nmin", type=int, default=2)
    p.add_argument("--ops", default=DIAMETER_OPS)
    p.add_argument("--out")
    p.set_defaults(func=cmd_diameter)

    p = sub.add_parser("calculus", help="mean distance moved by one mutation")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--samples", type=lambda s: int(float(s)), default=10**6)
    p.add_argument("--ops", default=CALCULUS_OPS)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_calculus)

    p = sub.add_parser("experiment", help="seeded EA or SA runs with summary and rank-sum tables")
    p.add_argument("algorithm", choices=["ea", "sa"])
    p.add_argument("--problem", required=True)
    p.add_argument("--ops", default=EXPERIMENT_OPS)
    p.add_argument("--budgets", default="1e2..1e7")
    p.add_argument("--runs", type=int, default=50)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", default=".")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("gen-instance", help="write a problem instance file")
    p.add_argument("problem")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--graph-only", action="store_true", help="write only the first graph of an LCS instance")
    p.set_defaults(func=cmd_gen_instance)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"cyclemut {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"cyclemut {args.command}: I/O error: {exc}", file=sys.stderr)
        return 4
    except (ValueError, RuntimeError, ArithmeticError) as exc:
        print(f"cyclemut {args.command}: error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
