"""Correlation, rank-sum testing and summary statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np


class PearsonAccumulator:
    """Streaming Pearson correlation using centred co-moments.

    Accumulators built on disjoint chunks can be combined with
    :meth:`merge`, so large scans can be split across workers.
    """

    def __init__(self, count=0, mean_x=0.0, mean_y=0.0, m2x=0.0, m2y=0.0, cxy=0.0):
        self.count = int(count)
        self.mean_x = float(mean_x)
        self.mean_y = float(mean_y)
        self.m2x = float(m2x)
        self.m2y = float(m2y)
        self.cxy = float(cxy)

    def add(self, x: float, y: float) -> None:
        self.count += 1
        dx = x - self.mean_x
        self.mean_x += dx / self.count
        dy = y - self.mean_y
        self.mean_y += dy / self.count
        self.m2x += dx * (x - self.mean_x)
        self.m2y += dy * (y - self.mean_y)
        self.cxy += dx * (y - self.mean_y)

    def extend(self, xs: Iterable[float], ys: Iterable[float]) -> None:
        for x, y in zip(xs, ys, strict=True):
            self.add(float(x), float(y))

    def merge(self, other: "PearsonAccumulator") -> "PearsonAccumulator":
        if other.count == 0:
            return PearsonAccumulator(*self.state())
        if self.count == 0:
            return PearsonAccumulator(*other.state())
        n = self.count + other.count
        dx = other.mean_x - self.mean_x
        dy = other.mean_y - self.mean_y
        w = self.count * other.count / n
        return PearsonAccumulator(
            n,
            self.mean_x + dx * other.count / n,
            self.mean_y + dy * other.count / n,
            self.m2x + other.m2x + dx * dx * w,
            self.m2y + other.m2y + dy * dy * w,
            self.cxy + other.cxy + dx * dy * w,
        )

    def state(self) -> tuple:
        return (self.count, self.mean_x, self.mean_y, self.m2x, self.m2y, self.cxy)

    def correlation(self) -> float:
        if self.count < 2:
            raise ValueError("correlation needs at least two observations")
        if self.m2x <= 0.0 or self.m2y <= 0.0:
            raise ValueError("correlation is undefined when a variable is constant")
        return self.cxy / math.sqrt(self.m2x * self.m2y)


def pearson(xs, ys) -> float:
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("pearson needs two 1-d sequences of equal length")
    acc = PearsonAccumulator()
    acc.extend(x, y)
    return acc.correlation()


class RankSumResult(NamedTuple):
    u: float
    z: float
    p: float


def midranks(values) -> np.ndarray:
    """1-based ranks with tied values sharing the average of their ranks."""
    v = np.asarray(values, dtype=np.float64)
    order = np.argsort(v, kind="mergesort")
    ranks = np.empty(v.size, dtype=np.float64)
    i = 0
    while i < v.size:
        j = i
        while j + 1 < v.size and v[order[j + 1]] == v[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def wilcoxon_rank_sum(a, b) -> RankSumResult:
    """Two-sided Wilcoxon rank-sum (Mann-Whitney) test, normal approximation.

    Uses midranks for ties, the tie-corrected variance and a 0.5
    continuity correction.  ``u`` is the statistic of sample ``a``.
    """
    x = np.asarray(a, dtype=np.float64).reshape(-1)
    y = np.asarray(b, dtype=np.float64).reshape(-1)
    n1, n2 = x.size, y.size
    if n1 == 0 or n2 == 0:
        raise ValueError("both samples must be non-empty")
    ranks = midranks(np.concatenate([x, y]))
    u = float(ranks[:n1].sum()) - n1 * (n1 + 1) / 2.0
    mu = n1 * n2 / 2.0
    n = n1 + n2
    _, counts = np.unique(np.concatenate([x, y]), return_counts=True)
    ties = float((counts**3 - counts).sum())
    var = n1 * n2 / 12.0 * ((n + 1) - ties / (n * (n - 1))) if n > 1 else 0.0
    if var <= 0.0:
        return RankSumResult(u, 0.0, 1.0)
    diff = u - mu
    z = math.copysign(max(abs(diff) - 0.5, 0.0), diff) / math.sqrt(var)
    p = min(1.0, math.erfc(abs(z) / math.sqrt(2.0)))
    return RankSumResult(u, z, p)


@dataclass(frozen=True)
class Summary:
    count: int
    mean: float
    std: float
    sem: float


def summarize(values) -> Summary:
    """Mean, sample standard deviation (n-1) and standard error of the mean."""
    v = np.asarray(values, dtype=np.float64).reshape(-1)
    if v.size == 0:
        raise ValueError("cannot summarise an empty sample")
    if v.size == 1:
        return Summary(1, float(v[0]), 0.0, 0.0)
    sd = float(v.std(ddof=1))
    return Summary(int(v.size), float(v.mean()), sd, sd / math.sqrt(v.size))
