import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rigorbench.aggregate import (
    AggregationError,
    CellStats,
    aggregate_runs,
    build_score_matrix,
    cells_to_csv,
    parse_cells_csv,
    pooled_from_summaries,
)
from rigorbench.scorelog import SummaryRecord
from rigorbench.selection import SelectedScores, SelectionStrategy, StrategyKind

from oracles import flat_mean_std

BEST_VAL = SelectionStrategy(StrategyKind.BEST_VALIDATION)
LAST_N = lambda n: SelectionStrategy(StrategyKind.LAST_N, n=n)

# fixture-backed per-run values for one cell (ImageNet1k under best-val)
ERM_IMAGENET_RUNS = [74.0, 73.7, 73.7, 73.8, 73.7, 73.7, 73.9, 73.7, 74.0, 73.8]


def scalar_scores(cell_values: dict) -> SelectedScores:
    entries = {}
    for (algo, ds), values in cell_values.items():
        for run, v in enumerate(values, start=1):
            entries[(algo, run, ds)] = v
    return SelectedScores(strategy=BEST_VAL, entries=entries)


class TestAggregateRuns:
    def test_reference_cell(self):
        out = aggregate_runs(scalar_scores({("ERM", "ImageNet1k"): ERM_IMAGENET_RUNS}))
        (cell,) = out
        exp_mean, exp_std = flat_mean_std(ERM_IMAGENET_RUNS)
        assert cell.mean == pytest.approx(exp_mean, abs=1e-12)
        assert cell.std == pytest.approx(exp_std, abs=1e-12)
        assert f"{cell.mean:.1f}" == "73.8" and f"{cell.std:.1f}" == "0.1"

    def test_single_run(self):
        (cell,) = aggregate_runs(scalar_scores({("A", "D"): [50.0]}))
        assert (cell.mean, cell.std, cell.count) == (50.0, 0.0, 1)
        assert cell.std_degenerate

    def test_last_n_pools_all_samples(self):
        entries = {
            ("A", 1, "D"): (10.0, 12.0),
            ("A", 2, "D"): (20.0, 22.0),
        }
        (cell,) = aggregate_runs(SelectedScores(strategy=LAST_N(2), entries=entries))
        exp_mean, exp_std = flat_mean_std([10.0, 12.0, 20.0, 22.0])
        assert cell.count == 4
        assert cell.mean == pytest.approx(exp_mean)
        assert cell.std == pytest.approx(exp_std)


class TestPooledFromSummaries:
    def test_two_single_sample_runs(self):
        cell = pooled_from_summaries([
            SummaryRecord("A", 1, "D", 10.0, 0.0, 1),
            SummaryRecord("A", 2, "D", 20.0, 0.0, 1),
        ])
        assert cell.mean == 15.0
        assert cell.std == pytest.approx(math.sqrt(50.0))  # two-point sample std

    def test_single_summary_identity(self):
        cell = pooled_from_summaries([SummaryRecord("A", 1, "D", 46.6, 1.5, 30)])
        assert cell.mean == pytest.approx(46.6)
        assert cell.std == pytest.approx(1.5)
        assert cell.count == 30

    def test_single_sample_total_degenerate(self):
        cell = pooled_from_summaries([SummaryRecord("A", 1, "D", 5.0, 0.0, 1)])
        assert cell.std == 0.0 and cell.std_degenerate

    def test_mixed_cells_rejected(self):
        with pytest.raises(AggregationError, match="cells"):
            pooled_from_summaries([
                SummaryRecord("A", 1, "D", 1.0, 0.0, 2),
                SummaryRecord("A", 1, "E", 1.0, 0.0, 2),
            ])

    @given(
        st.lists(
            st.lists(st.floats(min_value=-50, max_value=150), min_size=1, max_size=20),
            min_size=1,
            max_size=8,
        )
    )
    @settings(max_examples=150, deadline=None)
    def test_pooling_equals_flat_recomputation(self, runs):
        summaries = []
        flat = []
        for r, samples in enumerate(runs, start=1):
            mean, std = flat_mean_std(samples)
            summaries.append(SummaryRecord("A", r, "D", mean, std, len(samples)))
            flat.extend(samples)
        pooled = pooled_from_summaries(summaries)
        exp_mean, exp_std = flat_mean_std(flat)
        assert pooled.mean == pytest.approx(exp_mean, abs=1e-9)
        assert pooled.std == pytest.approx(exp_std, abs=1e-9)

    @given(
        st.lists(
            st.lists(st.floats(min_value=0, max_value=100), min_size=2, max_size=12),
            min_size=2,
            max_size=6,
        ),
        st.floats(min_value=-4, max_value=4).filter(lambda c: abs(c) > 1e-3),
    )
    @settings(max_examples=100, deadline=None)
    def test_scale_equivariance(self, runs, c):
        def build(scale):
            out = []
            for r, samples in enumerate(runs, start=1):
                mean, std = flat_mean_std([scale * x for x in samples])
                out.append(SummaryRecord("A", r, "D", mean, std, len(samples)))
            return pooled_from_summaries(out)

        base, scaled = build(1.0), build(c)
        assert scaled.mean == pytest.approx(c * base.mean, rel=1e-9, abs=1e-9)
        assert scaled.std == pytest.approx(abs(c) * base.std, rel=1e-9, abs=1e-9)

    def test_agrees_with_aggregate_runs_on_last_n(self):
        runs = {1: (44.0, 46.0, 45.0), 2: (48.0, 47.0, 49.0), 3: (41.0, 43.0, 42.0)}
        entries = {("A", r, "D"): v for r, v in runs.items()}
        (direct,) = aggregate_runs(SelectedScores(strategy=LAST_N(3), entries=entries))
        summaries = []
        for r, samples in runs.items():
            mean, std = flat_mean_std(list(samples))
            summaries.append(SummaryRecord("A", r, "D", mean, std, len(samples)))
        pooled = pooled_from_summaries(summaries)
        assert pooled.mean == pytest.approx(direct.mean, abs=1e-9)
        assert pooled.std == pytest.approx(direct.std, abs=1e-9)
        assert pooled.count == direct.count


class TestBuildScoreMatrix:
    def test_order_preserved(self):
        cells = [
            CellStats("B", "Y", 1.0, 0.0, 1), CellStats("B", "X", 2.0, 0.0, 1),
            CellStats("A", "Y", 3.0, 0.0, 1), CellStats("A", "X", 4.0, 0.0, 1),
        ]
        m = build_score_matrix(cells, ["B", "A"], ["X", "Y"])
        assert m.algorithms == ("B", "A")
        assert m.values == ((2.0, 1.0), (4.0, 3.0))

    def test_minimal_two_by_one(self):
        cells = [CellStats("A", "D", 1.0, 0.0, 1), CellStats("B", "D", 2.0, 0.0, 1)]
        m = build_score_matrix(cells, ["A", "B"], ["D"])
        assert (m.n, m.m) == (2, 1)

    def test_missing_cell_listed(self):
        cells = [CellStats("A", "D", 1.0, 0.0, 1)]
        with pytest.raises(AggregationError, match=r"\('B', 'D'\)"):
            build_score_matrix(cells, ["A", "B"], ["D"])


class TestCellsCsv:
    def test_round_trip_full_precision(self):
        cells = [
            CellStats("A", "D", 1.0 / 3.0, math.sqrt(2.0), 7),
            CellStats("B", "D", 73.84999999999999, 0.1, 10),
        ]
        parsed = parse_cells_csv(cells_to_csv(cells))
        for orig, back in zip(cells, parsed):
            assert back.mean == orig.mean
            assert back.std == orig.std
            assert back.count == orig.count
