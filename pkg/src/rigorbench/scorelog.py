"""Canonical data model for per-epoch benchmark scores and its wire formats.

Two interchangeable wire formats carry raw observations (JSON lines and CSV),
plus a summary CSV for pre-aggregated per-run statistics. Parsing is strict:
schema violations, duplicate observations and non-finite values are rejected
at ingest so that downstream statistics never see malformed data.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import BinaryIO, Union


class Split(Enum):
    VALIDATION = "val"
    TEST = "test"


class ParseError(ValueError):
    """Raised when a wire-format stream violates the schema."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")


@dataclass(frozen=True)
class ScoreRecord:
    """One observation of one metric at one epoch of one training run."""

    algorithm: str
    run: int
    epoch: int
    dataset: str
    split: Split
    metric: str
    value: float

    def __post_init__(self):
        if self.run < 1:
            raise ValueError(f"run must be >= 1, got {self.run}")
        if self.epoch < 1:
            raise ValueError(f"epoch must be >= 1, got {self.epoch}")
        if not math.isfinite(self.value):
            raise ValueError(f"value must be finite, got {self.value!r}")

    @property
    def key(self) -> tuple:
        return (self.algorithm, self.run, self.epoch, self.dataset, self.split, self.metric)


@dataclass(frozen=True)
class SummaryRecord:
    """Pre-aggregated per-run statistics: mean and std over `count` epoch samples."""

    algorithm: str
    run: int
    dataset: str
    mean: float
    std: float
    count: int

    def __post_init__(self):
        if self.count < 1:
            raise ValueError(f"count must be >= 1, got {self.count}")
        if self.std < 0:
            raise ValueError(f"std must be >= 0, got {self.std}")
        if self.count == 1 and self.std != 0.0:
            raise ValueError("std must be 0 when count is 1")
        if not (math.isfinite(self.mean) and math.isfinite(self.std)):
            raise ValueError("mean and std must be finite")


@dataclass(frozen=True)
class RecordSet:
    """Immutable collection of ScoreRecords with stable first-appearance order.

    Uniqueness of (algorithm, run, epoch, dataset, split, metric) is
    established at construction. Epoch contiguity and split requirements are
    checked by :func:`validate`, which reports rather than raises.
    """

    records: tuple[ScoreRecord, ...]
    declared_epochs: int | None = None

    def __post_init__(self):
        seen = set()
        for rec in self.records:
            if rec.key in seen:
                raise ParseError(f"duplicate record key {rec.key}")
            seen.add(rec.key)

    def __len__(self) -> int:
        return len(self.records)

    def algorithms(self) -> list[str]:
        """Algorithm names in order of first appearance."""
        out: dict[str, None] = {}
        for rec in self.records:
            out.setdefault(rec.algorithm, None)
        return list(out)

    def datasets(self, split: Split = Split.TEST) -> list[str]:
        """Dataset names for one split, in order of first appearance."""
        out: dict[str, None] = {}
        for rec in self.records:
            if rec.split is split:
                out.setdefault(rec.dataset, None)
        return list(out)

    def equivalent(self, other: "RecordSet") -> bool:
        """Equality up to record order (wire order carries no meaning)."""
        return set(self.records) == set(other.records)


Severity = str  # "error" | "warning"


@dataclass
class ValidationReport:
    findings: list[tuple[Severity, str, str]] = field(default_factory=list)

    def add_error(self, location: str, message: str) -> None:
        self.findings.append(("error", location, message))

    def add_warning(self, location: str, message: str) -> None:
        self.findings.append(("warning", location, message))

    @property
    def errors(self) -> list[tuple[Severity, str, str]]:
        return [f for f in self.findings if f[0] == "error"]

    @property
    def ok(self) -> bool:
        return not self.errors

    def render(self) -> str:
        if not self.findings:
            return "ok: no findings\n"
        lines = [f"{sev}: {loc}: {msg}" for sev, loc, msg in self.findings]
        return "\n".join(lines) + "\n"


_JSONL_FIELDS = {"algorithm", "run", "epoch", "dataset", "split", "metric", "value"}
_CSV_HEADER = ["algorithm", "run", "epoch", "dataset", "split", "metric", "value"]
_SUMMARY_HEADER = ["algorithm", "run", "dataset", "mean", "std", "count"]


def _decode(stream: Union[bytes, BinaryIO, str]) -> str:
    if isinstance(stream, str):
        return stream
    if isinstance(stream, bytes):
        return stream.decode("utf-8")
    data = stream.read()
    if isinstance(data, bytes):
        return data.decode("utf-8")
    return data


def _parse_split(token: str, line: int) -> Split:
    if token == "val":
        return Split.VALIDATION
    if token == "test":
        return Split.TEST
    raise ParseError(f"split must be 'val' or 'test', got {token!r}", line)


def _parse_int(token, name: str, line: int) -> int:
    if isinstance(token, bool) or not isinstance(token, int):
        try:
            if isinstance(token, str) and token.strip() == str(int(token)):
                return int(token)
        except ValueError:
            pass
        raise ParseError(f"{name} must be an integer, got {token!r}", line)
    return token


def _record_from_fields(fields: dict, line: int) -> ScoreRecord:
    run = _parse_int(fields["run"], "run", line)
    epoch = _parse_int(fields["epoch"], "epoch", line)
    value = fields["value"]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"value must be a number, got {value!r}", line)
    try:
        return ScoreRecord(
            algorithm=str(fields["algorithm"]),
            run=run,
            epoch=epoch,
            dataset=str(fields["dataset"]),
            split=_parse_split(fields["split"], line),
            metric=str(fields["metric"]),
            value=float(value),
        )
    except ValueError as exc:
        raise ParseError(str(exc), line) from exc


def parse_jsonl(stream: Union[bytes, BinaryIO, str]) -> RecordSet:
    """Parse the JSON-lines wire format: one object per line, fixed schema.

    Unknown fields, missing fields, malformed JSON, duplicate keys and
    non-finite values are all hard errors carrying the offending line number.
    """
    text = _decode(stream)
    records: list[ScoreRecord] = []
    seen: set[tuple] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ParseError(f"malformed JSON ({exc.msg})", lineno) from exc
        if not isinstance(obj, dict):
            raise ParseError("each line must be a JSON object", lineno)
        unknown = set(obj) - _JSONL_FIELDS
        if unknown:
            raise ParseError(f"unknown field(s) {sorted(unknown)}", lineno)
        missing = _JSONL_FIELDS - set(obj)
        if missing:
            raise ParseError(f"missing field(s) {sorted(missing)}", lineno)
        rec = _record_from_fields(obj, lineno)
        if rec.key in seen:
            raise ParseError(f"duplicate record key {rec.key}", lineno)
        seen.add(rec.key)
        records.append(rec)
    return RecordSet(records=tuple(records))


def parse_csv(stream: Union[bytes, BinaryIO, str]) -> RecordSet:
    """Parse the CSV wire format; semantically identical to the JSONL format."""
    text = _decode(stream)
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty stream, expected header", 1)
    if [h.strip() for h in header] != _CSV_HEADER:
        raise ParseError(f"expected header {','.join(_CSV_HEADER)}, got {','.join(header)}", 1)
    records: list[ScoreRecord] = []
    seen: set[tuple] = set()
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(_CSV_HEADER):
            raise ParseError(f"expected {len(_CSV_HEADER)} columns, got {len(row)}", lineno)
        algorithm, run_s, epoch_s, dataset, split_s, metric, value_s = [c.strip() for c in row]
        try:
            value = float(value_s)
        except ValueError:
            raise ParseError(f"unparsable value {value_s!r}", lineno)
        fields = {
            "algorithm": algorithm,
            "run": run_s,
            "epoch": epoch_s,
            "dataset": dataset,
            "split": split_s,
            "metric": metric,
            "value": value,
        }
        rec = _record_from_fields(fields, lineno)
        if rec.key in seen:
            raise ParseError(f"duplicate record key {rec.key}", lineno)
        seen.add(rec.key)
        records.append(rec)
    return RecordSet(records=tuple(records))


def parse_summary_csv(stream: Union[bytes, BinaryIO, str]) -> list[SummaryRecord]:
    """Parse the summary CSV: one pre-aggregated (run, dataset) row per line."""
    text = _decode(stream)
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty stream, expected header", 1)
    if [h.strip() for h in header] != _SUMMARY_HEADER:
        raise ParseError(f"expected header {','.join(_SUMMARY_HEADER)}, got {','.join(header)}", 1)
    out: list[SummaryRecord] = []
    seen: set[tuple] = set()
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(_SUMMARY_HEADER):
            raise ParseError(f"expected {len(_SUMMARY_HEADER)} columns, got {len(row)}", lineno)
        algorithm, run_s, dataset, mean_s, std_s, count_s = [c.strip() for c in row]
        try:
            rec = SummaryRecord(
                algorithm=algorithm,
                run=_parse_int(run_s, "run", lineno),
                dataset=dataset,
                mean=float(mean_s),
                std=float(std_s),
                count=_parse_int(count_s, "count", lineno),
            )
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from exc
        key = (rec.algorithm, rec.run, rec.dataset)
        if key in seen:
            raise ParseError(f"duplicate summary key {key}", lineno)
        seen.add(key)
        out.append(rec)
    return out


def serialize_jsonl(rs: RecordSet) -> str:
    lines = []
    for rec in rs.records:
        lines.append(json.dumps({
            "algorithm": rec.algorithm,
            "run": rec.run,
            "epoch": rec.epoch,
            "dataset": rec.dataset,
            "split": rec.split.value,
            "metric": rec.metric,
            "value": rec.value,
        }, separators=(",", ":")))
    return "\n".join(lines) + ("\n" if lines else "")


def serialize_csv(rs: RecordSet) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_CSV_HEADER)
    for rec in rs.records:
        writer.writerow([rec.algorithm, rec.run, rec.epoch, rec.dataset,
                         rec.split.value, rec.metric, repr(rec.value)])
    return buf.getvalue()


def _series_index(rs: RecordSet) -> dict[tuple, dict[int, float]]:
    """Group records into epoch series keyed by (algorithm, run, dataset, split, metric)."""
    series: dict[tuple, dict[int, float]] = {}
    for rec in rs.records:
        key = (rec.algorithm, rec.run, rec.dataset, rec.split, rec.metric)
        series.setdefault(key, {})[rec.epoch] = rec.value
    return series


def validate(
    rs: RecordSet,
    *,
    need_validation_split: bool = False,
    expected_epochs: int | None = None,
) -> ValidationReport:
    """Check structural soundness of a RecordSet; pure, never raises.

    Findings: epoch-range gaps, missing validation split per run when
    required, declared/expected epoch-count mismatches, inconsistent metrics
    within one (algorithm, dataset), and out-of-range percent values (warning).
    """
    report = ValidationReport()
    series = _series_index(rs)

    if expected_epochs is None:
        expected_epochs = rs.declared_epochs

    runs_with_val: set[tuple[str, int]] = set()
    all_runs: set[tuple[str, int]] = set()
    run_lengths: dict[tuple[str, int], set[int]] = {}
    metrics_by_cell: dict[tuple[str, str], set[str]] = {}

    for (algo, run, dataset, split, metric), epochs in sorted(
        series.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2], kv[0][3].value, kv[0][4])
    ):
        loc = f"{algo} run {run} {dataset}/{split.value}"
        all_runs.add((algo, run))
        if split is Split.VALIDATION:
            runs_with_val.add((algo, run))
        else:
            metrics_by_cell.setdefault((algo, dataset), set()).add(metric)

        emax = max(epochs)
        missing = sorted(set(range(1, emax + 1)) - set(epochs))
        if missing:
            report.add_error(loc, f"epochs not contiguous, missing {missing}")
        else:
            run_lengths.setdefault((algo, run), set()).add(emax)
            if expected_epochs is not None and emax != expected_epochs:
                report.add_error(loc, f"expected {expected_epochs} epochs, found {emax}")

        for epoch in sorted(epochs):
            v = epochs[epoch]
            if not 0.0 <= v <= 100.0:
                report.add_warning(loc, f"epoch {epoch}: value {v} outside [0, 100]")

    for (algo, run), lengths in sorted(run_lengths.items()):
        if len(lengths) > 1:
            report.add_error(f"{algo} run {run}",
                             f"series disagree on epoch count: {sorted(lengths)}")

    for (algo, dataset), metrics in sorted(metrics_by_cell.items()):
        if len(metrics) > 1:
            report.add_error(f"{algo} {dataset}",
                             f"runs use different metrics: {sorted(metrics)}")

    if need_validation_split:
        for algo, run in sorted(all_runs - runs_with_val):
            report.add_error(f"{algo} run {run}", "no validation-split records")

    return report
