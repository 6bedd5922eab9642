import numpy as np
import pytest

from cyclemut.distances import (DistanceMeasure, cycle_distance, cycle_edit_distance, cycle_type_diameter,
                                cyclic_edge_distance, diameter_formula, distance_diameter, exact_match_distance,
                                interchange_distance, k_cycle_distance, paired_distance, parse_distance,
                                reinsertion_distance, scramble_trivial_distance)
from cyclemut.landscape import neighborhood_moves
from cyclemut.mutation import parse_operator
from cyclemut.permutation import identity, random_permutation

from conftest import all_perms, bfs_distances

P1_10 = list(range(10))
P2_10 = [1, 0, 3, 2, 5, 4, 7, 6, 9, 8]
P3_10 = [0, 3, 2, 5, 4, 7, 6, 9, 8, 1]
EQ1_P2 = [2, 3, 0, 5, 6, 7, 8, 9, 4, 1]

MEASURES = [parse_distance(s) for s in ("cycle", "cycle-edit", "k-cycle:2", "k-cycle:3", "k-cycle:5",
                                        "interchange", "reinsertion", "exact-match", "cyclic-edge", "trivial")]


def lcs_length(a, b):
    """Quadratic dynamic program for the longest common subsequence."""
    n, m = len(a), len(b)
    t = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n):
        for j in range(m):
            t[i + 1][j + 1] = t[i][j] + 1 if a[i] == b[j] else max(t[i][j + 1], t[i + 1][j])
    return t[n][m]


def test_cycle_distance_triple():
    assert cycle_distance(P1_10, P2_10) == 5
    assert cycle_distance(P1_10, P3_10) == 1
    assert cycle_distance(P3_10, P2_10) == 1
    assert cycle_distance(P1_10, P2_10) > cycle_distance(P1_10, P3_10) + cycle_distance(P3_10, P2_10)


def test_cycle_distance_examples():
    assert cycle_distance(identity(10), EQ1_P2) == 3
    assert cycle_distance(EQ1_P2, EQ1_P2) == 0


def test_cycle_edit_examples():
    assert cycle_edit_distance(P1_10, P2_10) == 2
    assert cycle_edit_distance(P1_10, P3_10) == 1
    assert cycle_edit_distance(P3_10, P3_10) == 0


def test_k6_triangle_violation():
    p1, p2, p3 = [0, 1, 2, 3, 4, 5], [1, 0, 3, 2, 5, 4], [0, 3, 2, 5, 4, 1]
    assert (k_cycle_distance(p1, p2, 6), k_cycle_distance(p1, p3, 6), k_cycle_distance(p3, p2, 6)) == (3, 1, 1)


def test_k5_triangle_violation():
    p1, p2, p3 = [0, 1, 2, 3, 4, 5], [1, 0, 3, 2, 5, 4], [0, 3, 2, 5, 1, 4]
    assert (k_cycle_distance(p1, p2, 5), k_cycle_distance(p1, p3, 5), k_cycle_distance(p3, p2, 5)) == (3, 1, 1)


def test_k_cycle_worked_example():
    # one 7-cycle and one 3-cycle
    p = list(range(10))
    q = [1, 2, 3, 4, 5, 6, 0, 8, 9, 7]
    assert k_cycle_distance(p, q, 3) == 4
    assert k_cycle_distance(p, q, 20) == 2


def test_k2_equals_interchange_on_s5():
    perms = all_perms(5)
    for a in perms:
        for b in perms:
            assert k_cycle_distance(a, b, 2) == interchange_distance(a, b)


def test_interchange_examples():
    assert interchange_distance(identity(10), EQ1_P2) == 7
    assert interchange_distance(EQ1_P2, EQ1_P2) == 0


@pytest.mark.parametrize("spec,fn", [("swap", interchange_distance), ("insertion", reinsertion_distance)])
def test_edit_distances_match_bfs_on_s5(spec, fn):
    moves = [tuple(m) for m in neighborhood_moves(parse_operator(spec), 5)]
    ident = identity(5)
    for q, d in bfs_distances(5, moves).items():
        assert fn(ident, q) == d
    # edit distances are right-invariant, so checking from the identity covers all pairs
    p = np.array([3, 1, 4, 0, 2])
    for q, d in bfs_distances(5, moves, start=p).items():
        assert fn(p, q) == d


def test_reinsertion_examples():
    p = np.arange(10)
    assert reinsertion_distance(p, p[::-1]) == 9
    assert reinsertion_distance(p, p) == 0


def test_reinsertion_matches_quadratic_lcs(rng):
    for n in (2, 3, 7, 20, 60):
        for _ in range(300):
            a, b = random_permutation(n, rng), random_permutation(n, rng)
            assert reinsertion_distance(a, b) == n - lcs_length(a.tolist(), b.tolist())


def test_exact_match_examples():
    assert exact_match_distance([0, 1, 2], [1, 0, 2]) == 2
    assert exact_match_distance(identity(10), EQ1_P2) == 10
    assert exact_match_distance(EQ1_P2, EQ1_P2) == 0


def test_cyclic_edge_examples():
    assert cyclic_edge_distance([0, 1, 2, 3, 4], [1, 2, 3, 4, 0]) == 0
    for p in all_perms(6):
        assert cyclic_edge_distance(p, p[::-1]) == 0
        assert cyclic_edge_distance(p, p) == 0
    assert cyclic_edge_distance([0, 1, 2, 3, 4], [0, 2, 1, 3, 4]) == 2


def test_trivial_examples(rng):
    assert scramble_trivial_distance([0, 1, 2], [0, 1, 2]) == 0
    assert scramble_trivial_distance(identity(3), [1, 0, 2]) == 1
    for _ in range(100):
        a, b = random_permutation(8, rng), random_permutation(8, rng)
        assert scramble_trivial_distance(a, b) == int(not np.array_equal(a, b))


@pytest.mark.parametrize("m", MEASURES, ids=str)
def test_length_mismatch_rejected(m):
    with pytest.raises(ValueError):
        m([0, 1], [0, 1, 2])


def test_parse_distance():
    assert parse_distance("k-cycle:4") == DistanceMeasure("k-cycle", 4)
    assert parse_distance("Cyclic-Edge").kind == "cyclic-edge"
    for bad in ("k-cycle", "k-cycle:1", "hamming", "cycle:2"):
        with pytest.raises(ValueError):
            parse_distance(bad)


def test_paired_distance():
    pairs = {"cycle-alpha:0.5": "cycle-edit", "cycle-kmax:3": "k-cycle:3", "swap": "interchange",
             "insertion": "reinsertion", "reversal": "cyclic-edge", "scramble": "trivial"}
    for op, d in pairs.items():
        assert paired_distance(parse_operator(op)).spec == d


@pytest.mark.parametrize("m", MEASURES, ids=str)
@pytest.mark.parametrize("n", [2, 5, 10, 50])
def test_metric_axioms(m, n, rng):
    for _ in range(10_000 if n <= 10 else 2_000):
        a = random_permutation(n, rng)
        b = random_permutation(n, rng) if _ % 5 else a.copy()
        d = m(a, b)
        assert d >= 0
        assert d == m(b, a)
        assert (d == 0) == bool(np.array_equal(a, b)) or m.kind == "cyclic-edge"
        assert m(a, a) == 0


def test_cyclic_edge_zero_exactly_on_rotations_and_reflections():
    # cyclic-edge can only be a semi-metric on sequences: equality of edge sets means same cycle
    for p in all_perms(5):
        base = identity(5)
        d = cyclic_edge_distance(base, p)
        same_cycle = any(np.array_equal(np.roll(base, s), p) or np.array_equal(np.roll(base[::-1], s), p)
                         for s in range(5))
        assert (d == 0) == same_cycle


@pytest.mark.parametrize("m", [parse_distance(s) for s in ("cycle-edit", "k-cycle:2", "k-cycle:3",
                                                           "k-cycle:4")], ids=str)
def test_triangle_inequality(m, rng):
    perms = all_perms(5)
    ident = perms[0]
    # relabelling invariance lets the middle vertex be fixed at the identity
    d = {tuple(p): m(ident, p) for p in perms}
    for a in perms:
        for b in perms:
            assert m(a, b) <= d[tuple(a)] + d[tuple(b)]
    for _ in range(100_000):
        a, b, c = (random_permutation(20, rng) for _ in range(3))
        assert m(a, c) <= m(a, b) + m(b, c)


@pytest.mark.parametrize("m", MEASURES, ids=str)
def test_exhaustive_maximum_equals_diameter(m):
    # every measure is invariant under relabelling values, so the identity can stand in for p1
    for n in range(2, 8):
        perms = all_perms(n)
        assert max(m(perms[0], p) for p in perms) == distance_diameter(m, n), (m, n)


def test_exact_match_and_cyclic_edge_maxima():
    for n in range(4, 8):
        assert distance_diameter(DistanceMeasure("exact-match"), n) == n
    for n in range(5, 8):
        assert distance_diameter(DistanceMeasure("cyclic-edge"), n) == n
    assert distance_diameter(DistanceMeasure("cyclic-edge"), 4) == 2


def test_diameter_formula_examples():
    assert diameter_formula(parse_operator("cycle-alpha:0.5"), 10) == 2
    assert diameter_formula(parse_operator("cycle-kmax:3"), 10) == 5
    assert diameter_formula(parse_operator("swap"), 10) == 9
    assert diameter_formula(parse_operator("insertion"), 10) == 9
    assert diameter_formula(parse_operator("reversal"), 10) == 9
    assert diameter_formula(parse_operator("scramble"), 10) == 1
    assert diameter_formula(parse_operator("scramble"), 1) == 0
    assert [diameter_formula(parse_operator("cycle-alpha:0.5"), n) for n in (1, 2, 3, 4)] == [0, 1, 1, 2]
    assert diameter_formula(parse_operator("cycle-kmax:5"), 40) == pytest.approx(16.0)


@pytest.mark.parametrize("n,kmax", [(4, 2), (5, 3), (6, 5), (7, 5), (7, 6)])
def test_cycle_type_diameter_matches_bfs(n, kmax):
    moves = [tuple(m) for m in neighborhood_moves(parse_operator(f"cycle-kmax:{kmax}"), n)]
    assert cycle_type_diameter(n, kmax) == max(bfs_distances(n, moves).values())


def test_n1_distances_are_zero():
    for m in MEASURES:
        assert m([0], [0]) == 0
        assert distance_diameter(m, 1) == 0


def test_small_brute_force_cycle_edit():
    # fewest induced cycles of any length, by BFS over all cycle moves
    for n in (3, 4, 5):
        moves = [tuple(m) for m in neighborhood_moves(parse_operator(f"cycle-kmax:{n}"), n)]
        for q, d in bfs_distances(n, moves).items():
            assert cycle_edit_distance(identity(n), q) == d
