"""Statistically rigorous evaluation of benchmark score logs."""

__version__ = "0.1.0"

from .aggregate import (
    CellStats,
    ScoreMatrix,
    aggregate_runs,
    aggregate_summaries,
    build_score_matrix,
    pooled_from_summaries,
)
from .featstats import ChannelMoments, channel_moments, stat_swap
from .scorelog import (
    ParseError,
    RecordSet,
    ScoreRecord,
    Split,
    SummaryRecord,
    ValidationReport,
    parse_csv,
    parse_jsonl,
    parse_summary_csv,
    validate,
)
from .selection import (
    SelectedScores,
    SelectionStrategy,
    StrategyKind,
    apply_strategy,
    select_best_epoch,
    select_best_val,
    select_last_n,
)
from .simulate import SimConfig, selection_gap_study, simulate
from .special import chi2_sf, f_sf, norm_cdf, srange_sf
from .stats import (
    FriedmanResult,
    NemenyiMatrix,
    RankMatrix,
    friedman_chi2,
    friedman_test,
    iman_davenport,
    nemenyi_test,
    permutation_friedman,
    rank_columns,
)

__all__ = [
    "CellStats",
    "ChannelMoments",
    "FriedmanResult",
    "NemenyiMatrix",
    "ParseError",
    "RankMatrix",
    "RecordSet",
    "ScoreMatrix",
    "ScoreRecord",
    "SelectedScores",
    "SelectionStrategy",
    "SimConfig",
    "Split",
    "StrategyKind",
    "SummaryRecord",
    "ValidationReport",
    "aggregate_runs",
    "aggregate_summaries",
    "apply_strategy",
    "build_score_matrix",
    "channel_moments",
    "chi2_sf",
    "f_sf",
    "friedman_chi2",
    "friedman_test",
    "iman_davenport",
    "nemenyi_test",
    "norm_cdf",
    "parse_csv",
    "parse_jsonl",
    "parse_summary_csv",
    "permutation_friedman",
    "pooled_from_summaries",
    "rank_columns",
    "select_best_epoch",
    "select_best_val",
    "select_last_n",
    "selection_gap_study",
    "simulate",
    "srange_sf",
    "stat_swap",
    "validate",
]
