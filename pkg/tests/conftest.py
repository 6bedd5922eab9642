import itertools
from collections import Counter

import numpy as np
import pytest
from scipy import stats as sps


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def chi_square_uniform(samples, categories, alpha=0.01):
    """p-value of a chi-square test that ``samples`` are uniform over ``categories``."""
    counts = Counter(samples)
    assert set(counts) <= set(categories), set(counts) - set(categories)
    observed = [counts.get(c, 0) for c in categories]
    return sps.chisquare(observed).pvalue


def all_perms(n):
    return [np.array(t, dtype=np.int64) for t in itertools.permutations(range(n))]


def bfs_distances(n, moves, start=None):
    """Plain-dict BFS oracle: shortest move counts from ``start`` to every permutation."""
    start = tuple(range(n)) if start is None else tuple(start)
    dist = {start: 0}
    frontier = [start]
    while frontier:
        nxt = []
        for p in frontier:
            for m in moves:
                q = tuple(p[i] for i in m)
                if q not in dist:
                    dist[q] = dist[p] + 1
                    nxt.append(q)
        frontier = nxt
    return dist
