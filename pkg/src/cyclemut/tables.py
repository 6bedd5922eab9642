"""Experiment result tables and their CSV form.

Every CSV starts with ``#`` comment lines: a ``#schema=`` line naming the
layout and version, then provenance ``#key=value`` lines.  Floats are
written with ``repr`` so values survive a round trip exactly, which makes
the summary and significance files recomputable from the raw file.
"""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import astuple, dataclass, fields
from pathlib import Path
from typing import Iterable, Sequence, TextIO

import numpy as np

from .stats import summarize, wilcoxon_rank_sum

RAW_SCHEMA = "experiment-raw/1"
SUMMARY_SCHEMA = "experiment-summary/1"
SIGNIFICANCE_SCHEMA = "experiment-significance/1"


@dataclass(frozen=True)
class RunRecord:
    problem: str
    algorithm: str
    operator: str
    budget: int
    run_index: int
    instance_seed: int
    best_cost: float


class ExperimentTable:
    """Per-run results plus the per-cell summary and pairwise rank-sum tests."""

    def __init__(self, records: Iterable[RunRecord]):
        self.records = sorted(records, key=lambda r: (r.operator, r.budget, r.run_index))

    @property
    def operators(self) -> list[str]:
        seen = []
        for r in self.records:
            if r.operator not in seen:
                seen.append(r.operator)
        return seen

    @property
    def budgets(self) -> list[int]:
        return sorted({r.budget for r in self.records})

    def cell(self, operator: str, budget: int) -> list[float]:
        return [r.best_cost for r in self.records if r.operator == operator and r.budget == budget]

    def summary_rows(self) -> list[tuple]:
        rows = []
        for op in self.operators:
            for b in self.budgets:
                values = self.cell(op, b)
                if values:
                    s = summarize(values)
                    rows.append((op, b, s.count, s.mean, s.std, s.sem))
        return rows

    def significance_rows(self) -> list[tuple]:
        rows = []
        for b in self.budgets:
            for a, c in itertools.combinations(self.operators, 2):
                xa, xc = self.cell(a, b), self.cell(c, b)
                if xa and xc:
                    res = wilcoxon_rank_sum(xa, xc)
                    rows.append((a, c, b, res.u, res.z, res.p))
        return rows

    def compare(self, operator_a: str, operator_b: str, budget: int):
        return wilcoxon_rank_sum(self.cell(operator_a, budget), self.cell(operator_b, budget))

    def mean(self, operator: str, budget: int) -> float:
        return summarize(self.cell(operator, budget)).mean

    # -- CSV -------------------------------------------------------------

    def write_raw(self, out: TextIO, provenance: dict[str, str]) -> None:
        write_csv(out, RAW_SCHEMA, provenance, [f.name for f in fields(RunRecord)],
                  [astuple(r) for r in self.records])

    def write_summary(self, out: TextIO, provenance: dict[str, str]) -> None:
        write_csv(out, SUMMARY_SCHEMA, provenance, ["operator", "budget", "runs", "mean", "std", "std_error"],
                  self.summary_rows())

    def write_significance(self, out: TextIO, provenance: dict[str, str]) -> None:
        write_csv(out, SIGNIFICANCE_SCHEMA, provenance,
                  ["operator_a", "operator_b", "budget", "u_statistic", "z_score", "p_value"],
                  self.significance_rows())

    def write_all(self, directory: str | Path, provenance: dict[str, str], stem: str = "experiment") -> list[Path]:
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        paths = []
        for suffix, writer in (("raw", self.write_raw), ("summary", self.write_summary),
                               ("significance", self.write_significance)):
            path = d / f"{stem}_{suffix}.csv"
            with open(path, "w", encoding="utf-8", newline="") as fh:
                writer(fh, provenance)
            paths.append(path)
        return paths

    @classmethod
    def read_raw(cls, source: str | Path | TextIO) -> "ExperimentTable":
        if isinstance(source, (str, Path)):
            with open(source, encoding="utf-8", newline="") as fh:
                return cls.read_raw(fh)
        _, header, rows = read_csv(source)
        expected = [f.name for f in fields(RunRecord)]
        if header != expected:
            raise ValueError(f"unexpected raw header {header}")
        return cls(RunRecord(r[0], r[1], r[2], int(r[3]), int(r[4]), int(r[5]), float(r[6])) for r in rows)


def _cell(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def write_csv(out: TextIO, schema: str, provenance: dict[str, str], header: Sequence[str],
              rows: Iterable[Sequence]) -> None:
    out.write(f"#schema={schema}\n")
    for key, value in provenance.items():
        out.write(f"#{key}={value}\n")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])


def read_csv(source: TextIO) -> tuple[dict[str, str], list[str], list[list[str]]]:
    """Split a CSV written by :func:`write_csv` into comments, header and rows."""
    meta: dict[str, str] = {}
    body = []
    for line in source:
        if line.startswith("#"):
            key, _, value = line[1:].rstrip("\n").partition("=")
            meta[key] = value
        else:
            body.append(line)
    rows = list(csv.reader(io.StringIO("".join(body))))
    if not rows:
        raise ValueError("CSV has no header row")
    return meta, rows[0], rows[1:]
