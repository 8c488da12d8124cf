"""Aggregation of selected scores across runs into per-cell mean and std.

A cell is one (algorithm, dataset) pair. Scalar strategies aggregate the
per-run scalars; last-n pools every retained run x epoch sample, so the
reported dispersion combines within-run and between-run variability.
Sample standard deviation (divisor N-1) is used throughout; a single
sample yields std 0 with a degeneracy flag.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .scorelog import SummaryRecord
from .selection import SelectedScores


class AggregationError(ValueError):
    pass


@dataclass(frozen=True)
class CellStats:
    algorithm: str
    dataset: str
    mean: float
    std: float
    count: int
    std_degenerate: bool = False  # count was 1, std reported as 0

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be >= 1")
        if self.std < 0:
            raise ValueError("std must be >= 0")


@dataclass(frozen=True)
class ScoreMatrix:
    """n algorithms x m datasets of aggregated mean scores."""

    algorithms: tuple[str, ...]
    datasets: tuple[str, ...]
    values: tuple[tuple[float, ...], ...]  # row-major, values[i][j]
    higher_is_better: bool = True

    def __post_init__(self):
        n, m = len(self.algorithms), len(self.datasets)
        if n < 2 or m < 1:
            raise ValueError(f"need >= 2 algorithms and >= 1 dataset, got {n} x {m}")
        if len(self.values) != n or any(len(row) != m for row in self.values):
            raise ValueError("values shape must match algorithms x datasets")

    @property
    def n(self) -> int:
        return len(self.algorithms)

    @property
    def m(self) -> int:
        return len(self.datasets)


def _mean_std(samples: Sequence[float]) -> tuple[float, float, bool]:
    n = len(samples)
    mean = math.fsum(samples) / n
    if n == 1:
        return mean, 0.0, True
    ss = math.fsum((x - mean) ** 2 for x in samples)
    return mean, math.sqrt(ss / (n - 1)), False


def aggregate_runs(selected: SelectedScores) -> list[CellStats]:
    """Collapse SelectedScores over runs into one CellStats per cell.

    Scalar strategies: mean/std over per-run scalars (count = runs).
    Last-n: mean/std over the pooled run x epoch samples (count = runs * n).
    """
    pools: dict[tuple[str, str], list[float]] = {}
    order: list[tuple[str, str]] = []
    for (algo, run, dataset), entry in selected.entries.items():
        key = (algo, dataset)
        if key not in pools:
            pools[key] = []
            order.append(key)
        if isinstance(entry, tuple):
            pools[key].extend(entry)
        else:
            pools[key].append(entry)

    out = []
    for algo, dataset in sorted(order):
        samples = pools[(algo, dataset)]
        if not samples:
            raise AggregationError(f"empty cell ({algo}, {dataset})")
        mean, std, degenerate = _mean_std(samples)
        out.append(CellStats(algo, dataset, mean, std, len(samples), degenerate))
    return out


def pooled_from_summaries(summaries: Sequence[SummaryRecord]) -> CellStats:
    """Reconstruct pooled mean/std of one cell from per-run summaries.

    Each summary's std is taken as the sample std over its count samples.
    The total sum of squares is rebuilt as

        SS = sum_r[(count_r - 1) * std_r^2 + count_r * (mean_r - pooled_mean)^2]

    and the pooled std is sqrt(SS / (N - 1)) with N the total sample count.
    Equals a flat recomputation from the raw samples, had they been kept.
    """
    if not summaries:
        raise AggregationError("no summaries for cell")
    cells = {(s.algorithm, s.dataset) for s in summaries}
    if len(cells) > 1:
        raise AggregationError(f"summaries span multiple cells: {sorted(cells)}")
    ((algo, dataset),) = cells

    total = sum(s.count for s in summaries)
    pooled_mean = math.fsum(s.mean * s.count for s in summaries) / total
    if total < 2:
        return CellStats(algo, dataset, pooled_mean, 0.0, total, std_degenerate=True)
    ss = math.fsum(
        (s.count - 1) * s.std ** 2 + s.count * (s.mean - pooled_mean) ** 2
        for s in summaries
    )
    return CellStats(algo, dataset, pooled_mean, math.sqrt(ss / (total - 1)), total)


def aggregate_summaries(summaries: Iterable[SummaryRecord]) -> list[CellStats]:
    """Group summaries by cell and pool each group."""
    groups: dict[tuple[str, str], list[SummaryRecord]] = {}
    for s in summaries:
        groups.setdefault((s.algorithm, s.dataset), []).append(s)
    return [pooled_from_summaries(groups[key]) for key in sorted(groups)]


def build_score_matrix(
    cells: Iterable[CellStats],
    algorithms: Sequence[str],
    datasets: Sequence[str],
    *,
    higher_is_better: bool = True,
) -> ScoreMatrix:
    """Arrange cell means into a complete matrix in the given display order."""
    lookup = {(c.algorithm, c.dataset): c.mean for c in cells}
    missing = [
        (a, d) for a in algorithms for d in datasets if (a, d) not in lookup
    ]
    if missing:
        raise AggregationError(f"missing cell(s): {missing}")
    values = tuple(
        tuple(lookup[(a, d)] for d in datasets) for a in algorithms
    )
    return ScoreMatrix(
        algorithms=tuple(algorithms),
        datasets=tuple(datasets),
        values=values,
        higher_is_better=higher_is_better,
    )


def cells_to_csv(cells: Sequence[CellStats]) -> str:
    """Serialize cells at full precision; round-trips through parse_cells_csv."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["algorithm", "dataset", "mean", "std", "count"])
    for c in cells:
        writer.writerow([c.algorithm, c.dataset, repr(c.mean), repr(c.std), c.count])
    return buf.getvalue()


def parse_cells_csv(text: str) -> list[CellStats]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if header != ["algorithm", "dataset", "mean", "std", "count"]:
        raise AggregationError(f"unexpected header: {header}")
    out = []
    for row in reader:
        if not row:
            continue
        algo, dataset, mean_s, std_s, count_s = row
        out.append(CellStats(algo, dataset, float(mean_s), float(std_s), int(count_s)))
    return out
