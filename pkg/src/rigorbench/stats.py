"""Rank-based hypothesis testing over a score matrix.

The omnibus question is whether n algorithms perform equally across m
datasets. Algorithms are ranked within each dataset (rank 1 = best, ties
averaged); the rank statistic

    chi2 = 12 m / (n (n+1)) * [ sum_i R_i^2 - n (n+1)^2 / 4 ]

is approximately chi-square with n-1 dof, and its F-form correction

    F = (m-1) chi2 / (m (n-1) - chi2)

is approximately F(n-1, (m-1)(n-1)) and less conservative. When the
omnibus null is rejected, pairwise average-rank differences are assessed
with the studentized range distribution (post-hoc step), which controls
the family-wise Type I error over all pairs.

An exact/Monte-Carlo permutation evaluation of the same rank statistic is
provided as an independent check of the distributional approximations.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .aggregate import ScoreMatrix
from .special import f_sf, srange_sf

_SQRT2 = math.sqrt(2.0)
_REL_TOL = 1e-9

EXACT_PERMUTATION_LIMIT = 10_000_000


class StatsError(ValueError):
    pass


class ExactSizeError(StatsError):
    """Exact enumeration would exceed the size limit; use Monte Carlo."""


def max_threads() -> int:
    """Worker cap for parallel sections, from RIGORBENCH_THREADS (default 1)."""
    raw = os.environ.get("RIGORBENCH_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def rank_with_ties(values, *, higher_is_better: bool = True) -> list[float]:
    """Rank one dataset's scores; rank 1 is best, tied values share the
    average of their positional ranks."""
    n = len(values)
    for v in values:
        if math.isnan(v):
            raise StatsError("NaN score cannot be ranked")
    order = sorted(range(n), key=lambda i: -values[i] if higher_is_better else values[i])
    ranks = [0.0] * n
    pos = 0
    while pos < n:
        end = pos
        while end + 1 < n and values[order[end + 1]] == values[order[pos]]:
            end += 1
        avg = (pos + end) / 2.0 + 1.0  # positional ranks are 1-based
        for k in range(pos, end + 1):
            ranks[order[k]] = avg
        pos = end + 1
    return ranks


@dataclass(frozen=True)
class RankMatrix:
    algorithms: tuple[str, ...]
    ranks: tuple[tuple[float, ...], ...]  # ranks[i][j]: algorithm i on dataset j
    average_ranks: tuple[float, ...]

    @property
    def n(self) -> int:
        return len(self.algorithms)

    @property
    def m(self) -> int:
        return len(self.ranks[0])


def rank_columns(matrix: ScoreMatrix) -> RankMatrix:
    """Rank every dataset column of a score matrix and average per algorithm."""
    n, m = matrix.n, matrix.m
    cols = []
    for j in range(m):
        col = [matrix.values[i][j] for i in range(n)]
        cols.append(rank_with_ties(col, higher_is_better=matrix.higher_is_better))
    ranks = tuple(tuple(cols[j][i] for j in range(m)) for i in range(n))
    avg = tuple(math.fsum(row) / m for row in ranks)
    return RankMatrix(algorithms=matrix.algorithms, ranks=ranks, average_ranks=avg)


def _chi2_from_avg_ranks(avg_ranks, n: int, m: int) -> float:
    ssq = math.fsum(r * r for r in avg_ranks)
    return 12.0 * m / (n * (n + 1)) * (ssq - n * (n + 1) ** 2 / 4.0)


def friedman_chi2(rank_matrix: RankMatrix) -> float:
    """Rank chi-square statistic, uncorrected for ties."""
    n, m = rank_matrix.n, rank_matrix.m
    if n < 2:
        raise StatsError("need at least 2 algorithms")
    return _chi2_from_avg_ranks(rank_matrix.average_ranks, n, m)


def iman_davenport(chi2: float, n: int, m: int) -> float:
    """F-form correction of the rank chi-square statistic.

    Returns inf at the perfect-consistency boundary chi2 = m (n - 1),
    where the denominator vanishes.
    """
    upper = m * (n - 1)
    if chi2 < -_REL_TOL or chi2 > upper * (1.0 + _REL_TOL):
        raise StatsError(f"chi2 must lie in [0, {upper}], got {chi2}")
    denom = upper - chi2
    if denom <= upper * _REL_TOL:
        return math.inf
    return (m - 1) * chi2 / denom


@dataclass(frozen=True)
class FriedmanResult:
    chi2: float
    ff: float
    df1: int
    df2: int
    p_value: float
    alpha: float
    reject: bool
    degenerate: bool  # perfect rank consistency collapsed the F denominator


def friedman_test(matrix: ScoreMatrix, alpha: float = 0.05) -> FriedmanResult:
    """Omnibus test of equal performance across all algorithms."""
    if not 0.0 < alpha < 1.0:
        raise StatsError(f"alpha must be in (0, 1), got {alpha}")
    n, m = matrix.n, matrix.m
    if n < 2 or m < 2:
        raise StatsError(f"need >= 2 algorithms and >= 2 datasets, got {n} x {m}")
    rm = rank_columns(matrix)
    chi2 = friedman_chi2(rm)
    ff = iman_davenport(chi2, n, m)
    df1, df2 = n - 1, (m - 1) * (n - 1)
    if math.isinf(ff):
        p = 0.0
        degenerate = True
    else:
        p = f_sf(ff, df1, df2)
        degenerate = False
    return FriedmanResult(
        chi2=chi2, ff=ff, df1=df1, df2=df2, p_value=p,
        alpha=alpha, reject=p < alpha, degenerate=degenerate,
    )


@dataclass(frozen=True)
class NemenyiMatrix:
    """Pairwise post-hoc comparison of average ranks.

    Entries are symmetric n x n arrays with NaN (False for `significant`)
    on the diagonal.
    """

    algorithms: tuple[str, ...]
    rank_diff: np.ndarray
    standard_error: float
    q: np.ndarray
    p: np.ndarray
    significant: np.ndarray
    alpha: float

    @property
    def n(self) -> int:
        return len(self.algorithms)


def nemenyi_test(rank_matrix: RankMatrix, alpha: float = 0.05) -> NemenyiMatrix:
    """Pairwise comparison of average ranks via the studentized range.

    The pairwise statistic |R_i - R_j| / sqrt(n (n+1) / (6 m)) multiplied by
    sqrt(2) is referred to the studentized range distribution with k = n
    groups and infinite degrees of freedom. Intended to follow a rejected
    omnibus test (the caller enforces that ordering).
    """
    n, m = rank_matrix.n, rank_matrix.m
    if n < 2:
        raise StatsError("need at least 2 algorithms")
    if not 0.0 < alpha < 1.0:
        raise StatsError(f"alpha must be in (0, 1), got {alpha}")
    se = math.sqrt(n * (n + 1) / (6.0 * m))
    R = rank_matrix.average_ranks
    diff = np.full((n, n), np.nan)
    q = np.full((n, n), np.nan)
    p = np.full((n, n), np.nan)
    sig = np.zeros((n, n), dtype=bool)
    for i in range(n):
        for j in range(i + 1, n):
            d = abs(R[i] - R[j])
            qij = d / se
            pij = srange_sf(qij * _SQRT2, n)
            diff[i, j] = diff[j, i] = d
            q[i, j] = q[j, i] = qij
            p[i, j] = p[j, i] = pij
            sig[i, j] = sig[j, i] = pij < alpha
    return NemenyiMatrix(
        algorithms=rank_matrix.algorithms, rank_diff=diff,
        standard_error=se, q=q, p=p, significant=sig, alpha=alpha,
    )


def _column_rank_vectors(matrix: ScoreMatrix) -> list[list[float]]:
    rm = rank_columns(matrix)
    return [[rm.ranks[i][j] for i in range(matrix.n)] for j in range(matrix.m)]


def _chi2_of_rank_sums(sums: np.ndarray, n: int, m: int) -> np.ndarray:
    R = sums / m
    return 12.0 * m / (n * (n + 1)) * (np.sum(R * R, axis=-1) - n * (n + 1) ** 2 / 4.0)


def permutation_friedman(
    matrix: ScoreMatrix,
    mode: str = "exact",
    *,
    samples: int = 10_000,
    seed: int = 0,
) -> float:
    """Permutation p-value of the rank chi-square statistic.

    Under the null every within-dataset assignment of the observed ranks
    to algorithms is equally likely. The p-value is the fraction of
    column-wise rank permutations whose statistic is >= the observed one;
    the observed (identity) permutation counts, so p > 0 always.

    mode="exact" enumerates all (n!)^m permutations and requires that
    count to be <= EXACT_PERMUTATION_LIMIT. mode="monte-carlo" draws
    `samples` permutations from per-index deterministic substreams keyed
    by (seed, index), so results are reproducible and independent of
    evaluation order or thread count; the estimate is
    (1 + hits) / (samples + 1).
    """
    n, m = matrix.n, matrix.m
    cols = _column_rank_vectors(matrix)
    obs = _chi2_from_avg_ranks(
        [math.fsum(cols[j][i] for j in range(m)) / m for i in range(n)], n, m
    )
    threshold = obs - 1e-9

    if mode == "exact":
        total = math.factorial(n) ** m
        if total > EXACT_PERMUTATION_LIMIT:
            raise ExactSizeError(
                f"(n!)^m = {total} exceeds {EXACT_PERMUTATION_LIMIT}; use mode='monte-carlo'"
            )
        percol = [np.array(list(itertools.permutations(c))) for c in cols]
        last = percol[-1]
        hits = 0
        for combo in itertools.product(*percol[:-1]):
            base = np.sum(combo, axis=0) if combo else np.zeros(n)
            chi = _chi2_of_rank_sums(base[None, :] + last, n, m)
            hits += int(np.count_nonzero(chi >= threshold))
        return hits / total

    if mode != "monte-carlo":
        raise StatsError(f"unknown mode {mode!r}")
    if samples < 1:
        raise StatsError("samples must be >= 1")

    col_arrays = [np.asarray(c) for c in cols]

    def count_range(lo: int, hi: int) -> int:
        hits = 0
        for idx in range(lo, hi):
            rng = np.random.default_rng([seed, idx])
            sums = np.zeros(n)
            for col in col_arrays:
                sums += rng.permutation(col)
            if _chi2_of_rank_sums(sums, n, m) >= threshold:
                hits += 1
        return hits

    workers = min(max_threads(), samples)
    if workers <= 1:
        hits = count_range(0, samples)
    else:
        step = -(-samples // workers)
        bounds = [(lo, min(lo + step, samples)) for lo in range(0, samples, step)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            hits = sum(pool.map(lambda b: count_range(*b), bounds))
    return (1 + hits) / (samples + 1)
