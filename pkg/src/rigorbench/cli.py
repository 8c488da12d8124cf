"""Command-line front end for the full evaluation pipeline.

Subcommands:

* ``validate``  check score logs for structural problems; exit 0 iff clean.
* ``evaluate``  select -> aggregate -> omnibus test -> (on rejection)
  post-hoc test -> report. Writes cells.csv plus the rendered tables when
  --out is given, otherwise prints everything to stdout.
* ``simulate``  generate a synthetic score log from a config file.

Exit codes: 0 success, 1 validation or configuration failure, 2 failed
statistical precondition. RIGORBENCH_THREADS caps internal parallelism.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .aggregate import (
    AggregationError,
    aggregate_runs,
    aggregate_summaries,
    build_score_matrix,
    cells_to_csv,
)
from .report import ReportFormat, ReportStyle, render_friedman_summary, render_nemenyi_table, render_results_table
from .scorelog import ParseError, parse_csv, parse_jsonl, parse_summary_csv, serialize_jsonl, validate
from .selection import SelectionError, SelectionStrategy, StrategyKind, apply_strategy
from .simulate import ConfigError, load_config, simulate
from .stats import friedman_test, nemenyi_test, rank_columns

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_STATS_PRECONDITION = 2


def _load_records(path: Path):
    data = path.read_bytes()
    if path.suffix.lower() == ".csv":
        return parse_csv(data)
    return parse_jsonl(data)


def _strategy_from_args(args) -> SelectionStrategy:
    kind = StrategyKind(args.strategy)
    if kind is StrategyKind.LAST_N:
        return SelectionStrategy(kind, n=args.n)
    return SelectionStrategy(kind)


def cmd_validate(args) -> int:
    try:
        rs = _load_records(Path(args.input))
    except (ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    report = validate(
        rs,
        need_validation_split=args.need_validation_split,
        expected_epochs=args.expected_epochs,
    )
    sys.stdout.write(report.render())
    return EXIT_OK if report.ok else EXIT_INVALID


def _multi_epoch(rs) -> bool:
    epochs_seen: dict[tuple, set[int]] = {}
    for rec in rs.records:
        epochs_seen.setdefault((rec.algorithm, rec.run), set()).add(rec.epoch)
    return any(len(e) > 1 for e in epochs_seen.values())


def cmd_evaluate(args) -> int:
    strategy = _strategy_from_args(args)
    style = ReportStyle(format=ReportFormat(args.format), alpha=args.alpha)
    path = Path(args.input)

    try:
        if args.summary:
            summaries = parse_summary_csv(path.read_bytes())
            if not summaries:
                print("error: no summary rows", file=sys.stderr)
                return EXIT_INVALID
            cells = aggregate_summaries(summaries)
            algo_order: list[str] = []
            ds_order: list[str] = []
            for s in summaries:
                if s.algorithm not in algo_order:
                    algo_order.append(s.algorithm)
                if s.dataset not in ds_order:
                    ds_order.append(s.dataset)
        else:
            rs = _load_records(path)
            # best-val needs a validation series only when there is an
            # actual choice of epoch to make
            need_val = (
                strategy.kind is StrategyKind.BEST_VALIDATION and _multi_epoch(rs)
            )
            report = validate(rs, need_validation_split=need_val)
            if not report.ok:
                sys.stderr.write(report.render())
                print("error: input failed validation", file=sys.stderr)
                return EXIT_INVALID
            selected = apply_strategy(rs, strategy)
            cells = aggregate_runs(selected)
            algo_order = rs.algorithms()
            ds_order = rs.datasets()
    except (ParseError, SelectionError, AggregationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID

    # report order follows first appearance in the input
    by_key = {(c.algorithm, c.dataset): c for c in cells}
    cells = [by_key[(a, d)] for a in algo_order for d in ds_order if (a, d) in by_key]

    try:
        matrix = build_score_matrix(cells, algo_order, ds_order)
        result = friedman_test(matrix, alpha=args.alpha)
        posthoc = None
        if result.reject or args.force_posthoc:
            posthoc = nemenyi_test(rank_columns(matrix), alpha=args.alpha)
    except ValueError as exc:  # matrix shape or test preconditions
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STATS_PRECONDITION

    sections = {
        "cells.csv": cells_to_csv(cells),
        f"results.{style.format.extension}": render_results_table(cells, style),
        f"friedman.{style.format.extension}": render_friedman_summary(result, style),
    }
    if posthoc is not None:
        sections[f"nemenyi.{style.format.extension}"] = render_nemenyi_table(posthoc, style)

    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        for name, text in sections.items():
            (outdir / name).write_text(text, encoding="utf-8")
        if posthoc is None:
            print("omnibus test did not reject: post-hoc comparisons skipped")
        print(f"wrote {len(sections)} file(s) to {outdir}")
    else:
        for name, text in sections.items():
            print(f"== {name} ==")
            sys.stdout.write(text)
            print()
        if posthoc is None:
            print("omnibus test did not reject: post-hoc comparisons skipped")
    return EXIT_OK


def cmd_simulate(args) -> int:
    try:
        cfg = load_config(Path(args.config))
        if args.seed is not None:
            from dataclasses import replace

            cfg = replace(cfg, seed=args.seed)
        rs = simulate(cfg)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(serialize_jsonl(rs), encoding="utf-8")
    print(f"wrote {len(rs)} records to {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rigorbench",
        description="Statistically rigorous evaluation of benchmark score logs.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_val = sub.add_parser("validate", help="check a score log for structural problems")
    p_val.add_argument("input", help="JSONL or CSV score log")
    p_val.add_argument("--need-validation-split", action="store_true",
                       help="require a validation series per run")
    p_val.add_argument("--expected-epochs", type=int, default=None,
                       help="require exactly this many epochs per run")
    p_val.set_defaults(func=cmd_validate)

    p_eval = sub.add_parser("evaluate", help="run the full evaluation pipeline")
    p_eval.add_argument("input", help="score log (JSONL/CSV) or summary CSV with --summary")
    p_eval.add_argument("--strategy", choices=[k.value for k in StrategyKind],
                        default="best-val", help="model selection strategy (default best-val)")
    p_eval.add_argument("--n", type=int, default=30,
                        help="epoch count for the last-n strategy (default 30)")
    p_eval.add_argument("--alpha", type=float, default=0.05,
                        help="significance level (default 0.05)")
    p_eval.add_argument("--format", choices=[f.value for f in ReportFormat],
                        default="markdown", help="report format (default markdown)")
    p_eval.add_argument("--out", default=None,
                        help="output directory; omit to print to stdout")
    p_eval.add_argument("--summary", action="store_true",
                        help="input is a pre-aggregated summary CSV")
    p_eval.add_argument("--force-posthoc", action="store_true",
                        help="run pairwise comparisons even when the omnibus test does not reject")
    p_eval.add_argument("--seed", type=int, default=0,
                        help="seed for Monte-Carlo procedures (reserved)")
    p_eval.set_defaults(func=cmd_evaluate)

    p_sim = sub.add_parser("simulate", help="generate a synthetic score log")
    p_sim.add_argument("config", help="flat key-value config file")
    p_sim.add_argument("out", help="output JSONL path")
    p_sim.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_sim.set_defaults(func=cmd_simulate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
