"""Model-selection strategies mapping per-epoch score trajectories to scores.

Three strategies are supported:

* best-epoch: the maximum test score over all epochs, independently per
  dataset. An oracle upper bound; it peeks at test data.
* last-n: the final n per-epoch test scores, kept individually so that
  aggregation can pool dispersion over runs and epochs.
* best-val: the test score at the epoch with the best validation score.
  One epoch is chosen per run (validation is in-domain) and shared across
  all test datasets; validation ties break to the earliest epoch.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence

from .scorelog import RecordSet, Split, _series_index


class StrategyKind(Enum):
    BEST_EPOCH_ORACLE = "best-epoch"
    LAST_N = "last-n"
    BEST_VALIDATION = "best-val"


@dataclass(frozen=True)
class SelectionStrategy:
    kind: StrategyKind
    n: int | None = None  # only for LAST_N

    def __post_init__(self):
        if self.kind is StrategyKind.LAST_N:
            if self.n is None or self.n < 1:
                raise ValueError("last-n requires n >= 1")
        elif self.n is not None:
            raise ValueError(f"{self.kind.value} takes no n parameter")

    @property
    def scalar(self) -> bool:
        """True when the strategy yields one scalar per (run, dataset)."""
        return self.kind is not StrategyKind.LAST_N


@dataclass(frozen=True)
class SelectedScores:
    """Selected score(s) per (algorithm, run, dataset) under one strategy.

    Scalar strategies store a single float per entry; last-n stores the
    tuple of retained per-epoch samples (their mean is the strategy score).
    """

    strategy: SelectionStrategy
    entries: Mapping[tuple[str, int, str], float | tuple[float, ...]]


class SelectionError(ValueError):
    pass


def select_best_epoch(scores: Sequence[float]) -> float:
    """Maximum of a per-epoch test score sequence."""
    if len(scores) == 0:
        raise SelectionError("empty score sequence")
    return max(scores)


def select_last_n(scores: Sequence[float], n: int) -> tuple[float, ...]:
    """The final n samples of a per-epoch sequence, preserved individually."""
    if n < 1:
        raise SelectionError(f"n must be >= 1, got {n}")
    if len(scores) < n:
        raise SelectionError(f"sequence has {len(scores)} epochs, need at least {n}")
    return tuple(scores[len(scores) - n:])


def select_best_val(
    val_scores: Sequence[float],
    test_scores: Mapping[str, Sequence[float]],
) -> dict[str, float]:
    """Test score at the best-validation epoch, for every test dataset.

    The argmax epoch is shared across datasets; ties break to the earliest
    epoch. Validation and test sequences must cover the same epochs.
    """
    if len(val_scores) == 0:
        raise SelectionError("missing validation series")
    best_epoch = 0
    best = val_scores[0]
    for i, v in enumerate(val_scores):
        if v > best:
            best, best_epoch = v, i
    out = {}
    for dataset, series in test_scores.items():
        if len(series) != len(val_scores):
            raise SelectionError(
                f"dataset {dataset}: {len(series)} test epochs vs {len(val_scores)} validation epochs"
            )
        out[dataset] = series[best_epoch]
    return out


def _epoch_series(series: dict[int, float]) -> list[float]:
    return [series[e] for e in sorted(series)]


def apply_strategy(rs: RecordSet, strategy: SelectionStrategy) -> SelectedScores:
    """Apply one strategy to every (algorithm, run) of a validated RecordSet.

    Yields one entry per (algorithm, run, test dataset). For best-val a run
    must carry exactly one validation series, except in the degenerate
    single-epoch case where the choice of epoch is forced and the
    validation series is not consulted.
    """
    series = _series_index(rs)

    by_run: dict[tuple[str, int], dict] = {}
    for (algo, run, dataset, split, metric), epochs in series.items():
        slot = by_run.setdefault((algo, run), {"test": {}, "val": {}})
        if split is Split.TEST:
            slot["test"][dataset] = _epoch_series(epochs)
        else:
            slot["val"][dataset] = _epoch_series(epochs)

    entries: dict[tuple[str, int, str], float | tuple[float, ...]] = {}
    for algo, run in sorted(by_run):
        slot = by_run[(algo, run)]
        tests: dict[str, list[float]] = slot["test"]
        try:
            if strategy.kind is StrategyKind.BEST_EPOCH_ORACLE:
                for dataset, seq in tests.items():
                    entries[(algo, run, dataset)] = select_best_epoch(seq)
            elif strategy.kind is StrategyKind.LAST_N:
                assert strategy.n is not None
                for dataset, seq in tests.items():
                    entries[(algo, run, dataset)] = select_last_n(seq, strategy.n)
            else:
                vals = slot["val"]
                if len(vals) > 1:
                    raise SelectionError(
                        f"ambiguous validation series, found datasets {sorted(vals)}"
                    )
                if vals:
                    (val_seq,) = vals.values()
                    picked = select_best_val(val_seq, tests)
                elif all(len(seq) == 1 for seq in tests.values()):
                    # Single-epoch runs: epoch 1 is the only candidate.
                    picked = {dataset: seq[0] for dataset, seq in tests.items()}
                else:
                    raise SelectionError("missing validation series")
                for dataset, score in picked.items():
                    entries[(algo, run, dataset)] = score
        except SelectionError as exc:
            raise SelectionError(f"{algo} run {run}: {exc}") from exc

    return SelectedScores(strategy=strategy, entries=entries)
