"""Rendering of aggregated results and test outcomes.

Three formats: markdown, latex (booktabs-style rules) and csv. Display
formats round scores to one decimal and p-values to two (values below
0.005 print as "<0.01"); csv keeps full precision so parsed numbers
round-trip exactly. Significant post-hoc entries are emphasised
(markdown ** **, latex \\textbf). No cross-dataset average column is
emitted: scores from different datasets are not commensurable.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .aggregate import CellStats
from .stats import FriedmanResult, NemenyiMatrix


class ReportFormat(Enum):
    MARKDOWN = "markdown"
    LATEX = "latex"
    CSV = "csv"

    @property
    def extension(self) -> str:
        return {"markdown": "md", "latex": "tex", "csv": "csv"}[self.value]


@dataclass(frozen=True)
class ReportStyle:
    format: ReportFormat
    alpha: float = 0.05

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")


def _fmt_score(x: float) -> str:
    return f"{x:.1f}"


def _fmt_p(p: float) -> str:
    if p < 0.005:
        return "<0.01"
    return f"{p:.2f}"


def _grid(cells: Sequence[CellStats]) -> tuple[list[str], list[str], dict]:
    algorithms: dict[str, None] = {}
    datasets: dict[str, None] = {}
    lookup = {}
    for c in cells:
        algorithms.setdefault(c.algorithm, None)
        datasets.setdefault(c.dataset, None)
        lookup[(c.algorithm, c.dataset)] = c
    algos, dss = list(algorithms), list(datasets)
    missing = [(a, d) for a in algos for d in dss if (a, d) not in lookup]
    if missing:
        raise ValueError(f"incomplete grid, missing {missing}")
    return algos, dss, lookup


def _markdown_table(header: list[str], rows: list[list[str]]) -> str:
    lines = ["| " + " | ".join(header) + " |",
             "|" + "|".join("---" for _ in header) + "|"]
    for row in rows:
        lines.append("| " + " | ".join(row) + " |")
    return "\n".join(lines) + "\n"


def _latex_table(header: list[str], rows: list[list[str]]) -> str:
    cols = "l" + "c" * (len(header) - 1)
    lines = [f"\\begin{{tabular}}{{{cols}}}",
             "\\toprule",
             " & ".join(header) + " \\\\",
             "\\midrule"]
    for row in rows:
        lines.append(" & ".join(row) + " \\\\")
    lines += ["\\bottomrule", "\\end{tabular}"]
    return "\n".join(lines) + "\n"


def _csv_table(header: list[str], rows: list[list[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def render_results_table(cells: Sequence[CellStats], style: ReportStyle) -> str:
    """Algorithms x datasets table of `mean +/- std` strings."""
    algos, dss, lookup = _grid(cells)
    fmt = style.format
    if fmt is ReportFormat.CSV:
        # long format at full precision; identical to the cells.csv layout
        rows = [
            [a, d, repr(lookup[(a, d)].mean), repr(lookup[(a, d)].std), str(lookup[(a, d)].count)]
            for a in algos for d in dss
        ]
        return _csv_table(["algorithm", "dataset", "mean", "std", "count"], rows)
    pm = "±" if fmt is ReportFormat.MARKDOWN else "$\\pm$"
    header = ["Algorithm"] + dss
    rows = []
    for a in algos:
        row = [a]
        for d in dss:
            c = lookup[(a, d)]
            row.append(f"{_fmt_score(c.mean)} {pm} {_fmt_score(c.std)}")
        rows.append(row)
    table = _markdown_table if fmt is ReportFormat.MARKDOWN else _latex_table
    return table(header, rows)


def render_nemenyi_table(nm: NemenyiMatrix, style: ReportStyle) -> str:
    """Upper-triangular pairwise p-value table; significant entries bold."""
    fmt = style.format
    names = list(nm.algorithms)
    header = (["algorithm"] if fmt is ReportFormat.CSV else ["Algorithm"]) + names
    rows = []
    for i, a in enumerate(names):
        row = [a]
        for j in range(len(names)):
            if j <= i:
                row.append("")
                continue
            p = float(nm.p[i, j])
            if fmt is ReportFormat.CSV:
                row.append(repr(p))
            else:
                text = _fmt_p(p)
                if nm.significant[i, j]:
                    text = f"**{text}**" if fmt is ReportFormat.MARKDOWN else f"\\textbf{{{text}}}"
                row.append(text)
        rows.append(row)
    if fmt is ReportFormat.CSV:
        return _csv_table(header, rows)
    table = _markdown_table if fmt is ReportFormat.MARKDOWN else _latex_table
    return table(header, rows)


def render_friedman_summary(result: FriedmanResult, style: ReportStyle) -> str:
    """One block stating statistics, degrees of freedom, p and the decision."""
    fmt = style.format
    decision = "reject H0" if result.reject else "fail to reject H0"
    if fmt is ReportFormat.CSV:
        rows = [
            ["chi2", repr(result.chi2)],
            ["ff", repr(result.ff)],
            ["df1", str(result.df1)],
            ["df2", str(result.df2)],
            ["p_value", repr(result.p_value)],
            ["alpha", repr(result.alpha)],
            ["decision", decision],
            ["degenerate", str(result.degenerate).lower()],
        ]
        return _csv_table(["field", "value"], rows)
    ff_text = "inf" if math.isinf(result.ff) else f"{result.ff:.3f}"
    lines = [
        f"chi2 = {result.chi2:.3f}",
        f"F = {ff_text} (df {result.df1}, {result.df2})",
        f"p = {_fmt_p(result.p_value)}",
        f"alpha = {result.alpha:g}",
        f"decision: {decision}",
    ]
    if result.degenerate:
        lines.append("note: perfect rank consistency across datasets (degenerate F statistic)")
    if fmt is ReportFormat.MARKDOWN:
        return "\n".join(f"- {line}" for line in lines) + "\n"
    body = " \\\\\n".join(lines)
    return "\\begin{tabular}{l}\n" + body + "\n\\end{tabular}\n"
