import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sps

from cyclemut.stats import PearsonAccumulator, midranks, pearson, summarize, wilcoxon_rank_sum


def exact_rank_sum_p(na, nb, u):
    """Two-sided p of U under H0 by enumerating every rank assignment (no ties)."""
    mu = na * nb / 2
    us = np.array([sum(c) - na * (na + 1) / 2 for c in itertools.combinations(range(1, na + nb + 1), na)])
    return min(1.0, float(np.mean(np.abs(us - mu) >= abs(u - mu) - 1e-9)))


def max_normal_error(na, nb):
    worst = 0.0
    seen = set()
    for ranks in itertools.combinations(range(1, na + nb + 1), na):
        u = sum(ranks) - na * (na + 1) / 2
        if u in seen:
            continue
        seen.add(u)
        b = [r for r in range(1, na + nb + 1) if r not in ranks]
        worst = max(worst, abs(wilcoxon_rank_sum(list(ranks), b).p - exact_rank_sum_p(na, nb, u)))
    return worst


def test_pearson_examples():
    xs = np.array([1.0, 2.0, 5.0, 7.0])
    assert pearson(xs, 2 * xs + 3) == pytest.approx(1.0)
    assert pearson(xs, -xs) == pytest.approx(-1.0)
    assert pearson([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(0.8)


def test_pearson_errors():
    with pytest.raises(ValueError):
        pearson([1, 1, 1], [1, 2, 3])
    with pytest.raises(ValueError):
        pearson([1], [2])
    with pytest.raises(ValueError):
        pearson([1, 2], [1, 2, 3])


def test_pearson_matches_numpy_and_affine_invariance(rng):
    for _ in range(50):
        x = rng.normal(size=200)
        y = 0.3 * x + rng.normal(size=200)
        r = pearson(x, y)
        assert r == pytest.approx(np.corrcoef(x, y)[0, 1], rel=1e-12)
        assert pearson(4 * x + 9, 0.5 * y - 2) == pytest.approx(r, rel=1e-10)


def test_accumulator_merge_equals_single_pass(rng):
    x = rng.normal(size=10_001) * 1e3 + 5e6
    y = x * 0.2 + rng.normal(size=x.size)
    whole = PearsonAccumulator()
    whole.extend(x, y)
    parts = [PearsonAccumulator() for _ in range(4)]
    for part, idx in zip(parts, np.array_split(np.arange(x.size), 4)):
        part.extend(x[idx], y[idx])
    merged = PearsonAccumulator()
    for part in parts:
        merged = merged.merge(part)
    assert merged.count == whole.count
    assert merged.correlation() == pytest.approx(whole.correlation(), rel=1e-12)
    assert merged.merge(PearsonAccumulator()).state() == merged.state()


def test_midranks():
    assert midranks([10, 20, 20, 30]).tolist() == [1.0, 2.5, 2.5, 4.0]
    assert midranks([3, 1, 2]).tolist() == [3.0, 1.0, 2.0]


def test_rank_sum_examples():
    r = wilcoxon_rank_sum([1, 2, 3], [4, 5, 6])
    assert r.u == 0
    assert exact_rank_sum_p(3, 3, 0) == pytest.approx(0.1)
    assert abs(r.p - 0.1) < 0.02
    same = wilcoxon_rank_sum([1, 2, 3, 4], [1, 2, 3, 4])
    assert same.u == 8 and same.p == pytest.approx(1.0)
    with pytest.raises(ValueError):
        wilcoxon_rank_sum([], [1, 2])


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 6), min_size=1, max_size=15), st.lists(st.integers(0, 6), min_size=1, max_size=15))
def test_rank_sum_symmetry_and_range(a, b):
    ab, ba = wilcoxon_rank_sum(a, b), wilcoxon_rank_sum(b, a)
    assert 0 <= ab.u <= len(a) * len(b)
    assert ba.u == pytest.approx(len(a) * len(b) - ab.u)
    assert ab.p == pytest.approx(ba.p)
    assert 0.0 <= ab.p <= 1.0


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 8), min_size=2, max_size=30), st.lists(st.integers(0, 8), min_size=2, max_size=30))
def test_rank_sum_matches_scipy(a, b):
    if len(set(a + b)) == 1:
        return
    ours = wilcoxon_rank_sum(a, b)
    ref = sps.mannwhitneyu(a, b, alternative="two-sided", use_continuity=True, method="asymptotic")
    assert ours.u == pytest.approx(ref.statistic)
    assert ours.p == pytest.approx(ref.pvalue, rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("na,nb", [(5, 5), (5, 6), (5, 7), (6, 6), (6, 7), (7, 7)])
def test_rank_sum_close_to_exact(na, nb):
    assert max_normal_error(na, nb) < 0.02


@pytest.mark.xfail(strict=True, reason="normal approximation is off by more than 0.02 when a group has < 5 values")
def test_rank_sum_close_to_exact_all_small_sizes():
    assert max(max_normal_error(na, nb) for na in range(1, 8) for nb in range(1, 8)) < 0.02


def test_summarize(rng):
    s = summarize([5])
    assert (s.mean, s.std, s.sem) == (5.0, 0.0, 0.0)
    s = summarize([1, 2, 3])
    assert s.mean == 2.0 and s.std == 1.0 and s.sem == pytest.approx(1 / math.sqrt(3))
    big = summarize(rng.uniform(0, 10, size=100_000))
    assert abs(big.mean - 5.0) < 3 * big.sem
    with pytest.raises(ValueError):
        summarize([])
