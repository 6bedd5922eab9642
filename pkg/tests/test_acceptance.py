"""Acceptance suite: one PASS/FAIL line per criterion, printed as it runs.

Run with ``pytest tests/test_acceptance.py -v``.  The full suite takes
roughly 20 minutes on one core; the exhaustive FDC scans and the
desk-scale experiments dominate.
"""

import io
import itertools
import zlib

import numpy as np
import pytest

from cyclemut.cli import main
from cyclemut.distances import DistanceMeasure, cycle_distance, k_cycle_distance
from cyclemut.landscape import landscape_delta
from cyclemut.mutation import expected_cycle_length, parse_operator
from cyclemut.permutation import create_cycle, cycle_decomposition
from cyclemut.sampling import choose_sampler, insertion_sample, pool_sample, reservoir_sample
from cyclemut.tables import ExperimentTable, read_csv

from conftest import chi_square_uniform

TSP_ROWS = {"cycle-alpha:0.5": -0.0569, "cycle-kmax:5": 0.1801, "cycle-kmax:4": 0.1667, "cycle-kmax:3": 0.2482,
            "swap": 0.3318, "insertion": 0.5277, "reversal": 0.8459, "scramble": 0.0117}
LCS_ROWS = {"cycle-alpha:0.5": -0.0278, "cycle-kmax:5": -0.5342, "cycle-kmax:4": -0.3984, "cycle-kmax:3": -0.6180,
            "swap": -0.6355, "insertion": -0.3547, "reversal": -0.0350, "scramble": -0.0340}
FDC_TOL = 0.005
QAP_SEED = 7
EXPERIMENT_SEED = 2024
CALCULUS_SEED = 2024


def report(capsys, number, title, passed, detail):
    with capsys.disabled():
        print(f"\n[{'PASS' if passed else 'FAIL'}] criterion {number} {title}: {detail}")
    assert passed, detail


def cli_rows(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    assert code == 0, err
    _, header, rows = read_csv(io.StringIO(out))
    return [dict(zip(header, r)) for r in rows]


def fdc_check(capsys, problem, expected):
    rows = {r["operator"]: r for r in cli_rows(capsys, "fdc", problem)}
    errors = {op: abs(float(rows[op]["r"]) - want) for op, want in expected.items()}
    bad = {op: round(float(rows[op]["r"]), 4) for op, e in errors.items() if e > FDC_TOL}
    got = " ".join(f"{op}={float(rows[op]['r']):.4f}" for op in expected)
    return rows, bad, got


def test_criterion_1_tsp_fdc(capsys):
    rows, bad, got = fdc_check(capsys, "tsp-circle", TSP_ROWS)
    optima = {r["optima_count"] for r in rows.values()}
    passed = not bad and optima == {"20"}
    report(capsys, 1, "circle TSP FDC", passed, f"{got} optima={optima}" + (f" off: {bad}" if bad else ""))


def test_criterion_2_lcs_fdc(capsys):
    rows, bad, got = fdc_check(capsys, "lcs-petersen", LCS_ROWS)
    optima = {r["optima_count"] for r in rows.values()}
    passed = not bad and optima == {"120"}
    report(capsys, 2, "Petersen LCS FDC", passed, f"{got} optima={optima}" + (f" off: {bad}" if bad else ""))


def test_criterion_3_qap_fdc_property(capsys):
    rows = {r["operator"]: float(r["r"]) for r in
            cli_rows(capsys, "fdc", "qap-planted", "--seed", str(QAP_SEED), "--ops", "swap,cycle-kmax:3,scramble")}
    swap, c3, scr = rows["swap"], rows["cycle-kmax:3"], rows["scramble"]
    passed = swap >= 0.15 and c3 >= 0.15 and abs(scr) <= 0.05
    report(capsys, 3, "planted QAP FDC ordering", passed,
           f"seed={QAP_SEED} swap={swap:.4f} (>=0.15) cycle3={c3:.4f} (>=0.15) scramble={scr:.4f} (|r|<=0.05)")


def test_criterion_4_diameters(capsys):
    rows = cli_rows(capsys, "diameter", "--nmin", "4", "--nmax", "7")
    mismatches = [(r["operator"], r["n"], r["formula"], r["bfs"]) for r in rows if r["match"] != "1"]
    ops = {r["operator"] for r in rows}
    passed = not mismatches and len(rows) == 9 * 4 and len(ops) == 9
    report(capsys, 4, "BFS diameters equal closed forms", passed,
           f"{len(rows)} (operator, n) cells for n=4..7, mismatches={mismatches}")


def test_criterion_5_calculus(capsys):
    rows = cli_rows(capsys, "calculus", "--n", "100", "--samples", "1000000", "--seed", str(CALCULUS_SEED))
    failures = []
    for r in rows:
        op = r["operator"]
        tol = 0.03 if op == "scramble" else 0.02
        em, lo, hi = float(r["delta_em"]), float(r["formula_em_low"]), float(r["formula_em_high"])
        gap = max(lo - em, em - hi, 0.0) / lo
        if gap > tol:
            failures.append(f"{op} em {em:.4f} vs [{lo:.4f},{hi:.4f}]")
        ce, fce = float(r["delta_ce"]), float(r["formula_ce"])
        if abs(ce - fce) / fce > tol:
            failures.append(f"{op} ce {ce:.4f} vs {fce:.4f} ({100 * (ce - fce) / fce:+.1f}%)")
        if op == "swap":
            exact = (float(r["delta_em"]), float(r["var_em"]), float(r["delta_ce"]), float(r["var_ce"]))
            if exact != (2.0, 0.0, 4.0, 0.0):
                failures.append(f"swap (em, var, ce, var) = {tuple(round(x, 4) for x in exact)} not (2, 0, 4, 0)")
    report(capsys, 5, "landscape calculus at n=100", not failures,
           f"{len(rows)} operators, {len(failures)} failing checks: " + "; ".join(failures))


def test_criterion_6_expected_cycle_length(capsys):
    worst = 0.0
    details = []
    for i, (alpha, n) in enumerate(itertools.product((0.25, 0.5, 0.75), (10, 50))):
        mc = landscape_delta(parse_operator(f"cycle-alpha:{alpha}"), DistanceMeasure("exact-match"), n, 1_000_000,
                             np.random.default_rng(600 + i))
        exact = expected_cycle_length(alpha, n)
        worst = max(worst, abs(mc - exact) / exact)
        details.append(f"a={alpha},n={n}:{mc:.4f}/{exact:.4f}")
    bounds = all(expected_cycle_length(a, n) <= b + 1e-12 for a, b in ((0.25, 7 / 3), (0.5, 3.0), (0.75, 5.0))
                 for n in (10, 50, 1000))
    passed = worst < 0.01 and bounds
    report(capsys, 6, "E[k] closed form", passed, f"max rel err {100 * worst:.3f}% bounds={bounds} " + " ".join(details))


def test_criterion_7_micro_examples(capsys):
    checks = {}
    checks["create_cycle"] = create_cycle([2, 6, 0, 5, 3, 8, 7, 9, 4, 1], [3, 7, 1, 4]).tolist() == \
        [2, 3, 0, 9, 5, 8, 7, 6, 4, 1]
    d = cycle_decomposition(list(range(10)), [2, 3, 0, 5, 6, 7, 8, 9, 4, 1])
    checks["decomposition"] = sorted(sorted(c) for c in d.cycles) == [[0, 2], [1, 3, 5, 7, 9], [4, 6, 8]]
    p1, p2, p3 = list(range(10)), [1, 0, 3, 2, 5, 4, 7, 6, 9, 8], [0, 3, 2, 5, 4, 7, 6, 9, 8, 1]
    checks["cycle triple"] = (cycle_distance(p1, p2), cycle_distance(p1, p3), cycle_distance(p3, p2)) == (5, 1, 1)
    q1, q2 = [0, 1, 2, 3, 4, 5], [1, 0, 3, 2, 5, 4]
    for k, q3 in ((6, [0, 3, 2, 5, 4, 1]), (5, [0, 3, 2, 5, 1, 4])):
        triple = (k_cycle_distance(q1, q2, k), k_cycle_distance(q1, q3, k), k_cycle_distance(q3, q2, k))
        checks[f"k={k} triple"] = triple == (3, 1, 1)
    report(capsys, 7, "worked micro-examples", all(checks.values()),
           " ".join(f"{k}={'ok' if v else 'WRONG'}" for k, v in checks.items()))


def test_criterion_8_samplers(capsys):
    pvals = {}
    for fn in (insertion_sample, pool_sample, reservoir_sample):
        for n, k in ((5, 2), (6, 3), (6, 4), (7, 2)):
            rng = np.random.default_rng(zlib.crc32(f"{fn.__name__}:{n}:{k}".encode()))
            subsets = list(itertools.combinations(range(n), k))
            draws = [tuple(sorted(fn(n, k, rng).tolist())) for _ in range(10_000 * len(subsets))]
            pvals[(fn.__name__, n, k)] = chi_square_uniform(draws, subsets)
    routing = (choose_sampler(100, 2), choose_sampler(100, 60), choose_sampler(100, 20)) == \
        ("insertion", "reservoir", "pool")
    low = min(pvals.values())
    passed = low > 0.01 and routing
    report(capsys, 8, "sampler uniformity and routing", passed,
           f"{len(pvals)} chi-square tests, min p={low:.4f}, routing={'ok' if routing else 'WRONG'}")


def _experiment(capsys, tmp_path, algorithm, problem, ops):
    out = tmp_path / f"{algorithm}_{problem.split(':')[0]}"
    out.mkdir()
    code = main(["experiment", algorithm, "--problem", problem, "--ops", ops, "--budgets", "1000000",
                 "--runs", "20", "--seed", str(EXPERIMENT_SEED), "--out", str(out)])
    capsys.readouterr()
    assert code == 0
    return ExperimentTable.read_raw(next(out.glob("*_raw.csv")))


def test_criterion_9_desk_experiments(capsys, tmp_path):
    budget = 1_000_000
    verdicts = []

    qap = _experiment(capsys, tmp_path, "ea", "qap-random:n=30", "cycle-alpha:0.25,swap")
    res = qap.compare("cycle-alpha:0.25", "swap", budget)
    ok_a = qap.mean("cycle-alpha:0.25", budget) < qap.mean("swap", budget) and res.p < 0.05
    verdicts.append(ok_a)
    parts = [f"(a) QAP cycle0.25 {qap.mean('cycle-alpha:0.25', budget):.1f} vs swap {qap.mean('swap', budget):.1f} "
             f"p={res.p:.4f} {'ok' if ok_a else 'FAIL'}"]

    for algorithm in ("ea", "sa"):
        tsp = _experiment(capsys, tmp_path, algorithm, "tsp-random:n=50",
                          "cycle-alpha:0.25,cycle-alpha:0.5,cycle-alpha:0.75,cycle-kmax:3,cycle-kmax:4,"
                          "cycle-kmax:5,swap,insertion,reversal,scramble")
        worst = max(tsp.compare("reversal", op, budget).p for op in tsp.operators if op != "reversal")
        beaten = all(tsp.mean("reversal", budget) < tsp.mean(op, budget) for op in tsp.operators if op != "reversal")
        ok_b = beaten and worst < 0.05
        verdicts.append(ok_b)
        parts.append(f"(b) TSP {algorithm} reversal {tsp.mean('reversal', budget):.1f} best={beaten} "
                     f"max p={worst:.2e} {'ok' if ok_b else 'FAIL'}")

    lcs = _experiment(capsys, tmp_path, "ea", "lcs-gpetersen:25,2", "cycle-kmax:4,cycle-kmax:5,swap")
    for op in ("cycle-kmax:4", "cycle-kmax:5"):
        res = lcs.compare(op, "swap", budget)
        ok_c = lcs.mean(op, budget) < lcs.mean("swap", budget) and res.p < 0.05
        verdicts.append(ok_c)
        parts.append(f"(c) LCS {op} {lcs.mean(op, budget):.2f} vs swap {lcs.mean('swap', budget):.2f} "
                     f"p={res.p:.4f} {'ok' if ok_c else 'FAIL'}")
    report(capsys, 9, "desk-scale experiments", all(verdicts), "; ".join(parts))


def test_criterion_10_determinism(capsys, tmp_path):
    commands = {
        "fdc": ["fdc", "qap-planted", "--seed", "7", "--ops", "swap,reversal"],
        "diameter": ["diameter", "--nmax", "6"],
        "calculus": ["calculus", "--n", "40", "--samples", "20000", "--seed", "5"],
        "gen-instance": ["gen-instance", "lcs-random:v=20", "--seed", "3"],
    }
    same = {}
    for name, argv in commands.items():
        outputs = []
        for rep in range(2):
            path = tmp_path / f"{name}{rep}.csv"
            assert main(argv + ["--out", str(path)]) == 0
            outputs.append(path.read_bytes())
        same[name] = outputs[0] == outputs[1]
    for algorithm in ("ea", "sa"):
        dirs = []
        for rep, jobs in enumerate(("1", "2")):
            d = tmp_path / f"{algorithm}{rep}"
            d.mkdir()
            assert main(["experiment", algorithm, "--problem", "qap-random:n=12", "--ops", "swap,cycle-kmax:4",
                         "--budgets", "100,10000", "--runs", "4", "--seed", "9", "--out", str(d),
                         "--jobs", jobs]) == 0
            dirs.append(d)
        files = sorted(p.name for p in dirs[0].iterdir())
        same[f"experiment {algorithm}"] = len(files) == 3 and all(
            (dirs[0] / f).read_bytes() == (dirs[1] / f).read_bytes() for f in files)
    capsys.readouterr()
    report(capsys, 10, "byte-identical reruns", all(same.values()),
           " ".join(f"{k}={'same' if v else 'DIFFERENT'}" for k, v in same.items()))
