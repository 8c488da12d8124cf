import pytest

from rigorbench.scorelog import (
    ParseError,
    RecordSet,
    ScoreRecord,
    Split,
    parse_csv,
    parse_jsonl,
    parse_summary_csv,
    serialize_csv,
    serialize_jsonl,
    validate,
)

ONE_LINE = (
    '{"algorithm":"ERM","run":1,"epoch":1,"dataset":"Silhouette",'
    '"split":"test","metric":"top1_acc","value":44.3}\n'
)
ONE_ROW_CSV = (
    "algorithm,run,epoch,dataset,split,metric,value\n"
    "ERM,1,1,Silhouette,test,top1_acc,44.3\n"
)


def make_records(epochs, *, algo="A", run=1, dataset="D", split=Split.TEST, start=1):
    return [
        ScoreRecord(algo, run, e, dataset, split, "top1_acc", 50.0 + e)
        for e in range(start, start + epochs)
    ]


class TestParseJsonl:
    def test_single_line(self):
        rs = parse_jsonl(ONE_LINE.encode())
        assert len(rs) == 1
        rec = rs.records[0]
        assert rec == ScoreRecord("ERM", 1, 1, "Silhouette", Split.TEST, "top1_acc", 44.3)

    def test_duplicate_key_rejected(self):
        dup = ONE_LINE + ONE_LINE.replace("44.3", "44.4")
        with pytest.raises(ParseError, match="duplicate"):
            parse_jsonl(dup.encode())

    def test_nan_value_rejected(self):
        bad = ONE_LINE.replace("44.3", '"NaN"')
        with pytest.raises(ParseError, match="value"):
            parse_jsonl(bad.encode())

    def test_unknown_field_rejected(self):
        bad = ONE_LINE.replace('"value":44.3', '"value":44.3,"extra":1')
        with pytest.raises(ParseError, match="unknown field"):
            parse_jsonl(bad.encode())

    def test_missing_field_rejected(self):
        bad = '{"algorithm":"ERM","run":1,"epoch":1,"dataset":"D","split":"test","metric":"m"}'
        with pytest.raises(ParseError, match="missing field"):
            parse_jsonl(bad.encode())

    def test_malformed_json_names_line(self):
        with pytest.raises(ParseError, match="line 2"):
            parse_jsonl((ONE_LINE + "{not json}\n").encode())

    def test_bad_split_token(self):
        bad = ONE_LINE.replace('"test"', '"validation"')
        with pytest.raises(ParseError, match="split"):
            parse_jsonl(bad.encode())


class TestParseCsv:
    def test_matches_jsonl(self):
        assert parse_csv(ONE_ROW_CSV.encode()).equivalent(parse_jsonl(ONE_LINE.encode()))

    def test_header_only_is_empty(self):
        rs = parse_csv(b"algorithm,run,epoch,dataset,split,metric,value\n")
        assert len(rs) == 0

    def test_epoch_zero_rejected(self):
        bad = ONE_ROW_CSV.replace("ERM,1,1", "ERM,1,0")
        with pytest.raises(ParseError, match="epoch"):
            parse_csv(bad.encode())

    def test_bad_number_rejected(self):
        bad = ONE_ROW_CSV.replace("44.3", "forty")
        with pytest.raises(ParseError, match="unparsable"):
            parse_csv(bad.encode())

    def test_missing_column_rejected(self):
        with pytest.raises(ParseError, match="header"):
            parse_csv(b"algorithm,run,epoch,dataset,split,value\nA,1,1,D,test,1\n")


class TestParseSummaryCsv:
    def test_single_row(self):
        rows = parse_summary_csv(b"algorithm,run,dataset,mean,std,count\nERM,1,Silhouette,44.3,1.5,30\n")
        assert len(rows) == 1
        s = rows[0]
        assert (s.mean, s.std, s.count) == (44.3, 1.5, 30)

    def test_negative_std_rejected(self):
        with pytest.raises(ParseError, match="std"):
            parse_summary_csv(b"algorithm,run,dataset,mean,std,count\nX,1,D,50.0,-1,30\n")

    def test_single_sample_summary(self):
        rows = parse_summary_csv(b"algorithm,run,dataset,mean,std,count\nX,1,D,50.0,0.0,1\n")
        assert rows[0].std == 0.0 and rows[0].count == 1

    def test_count_zero_rejected(self):
        with pytest.raises(ParseError, match="count"):
            parse_summary_csv(b"algorithm,run,dataset,mean,std,count\nX,1,D,50.0,0.0,0\n")


class TestRoundTrip:
    def test_jsonl_round_trip(self):
        rs = RecordSet(tuple(make_records(5) + make_records(5, dataset="E", split=Split.VALIDATION)))
        assert parse_jsonl(serialize_jsonl(rs)).equivalent(rs)

    def test_csv_round_trip(self):
        rs = RecordSet(tuple(make_records(7, algo="B", run=3)))
        assert parse_csv(serialize_csv(rs)).equivalent(rs)

    def test_formats_equivalent(self):
        rs = RecordSet(tuple(make_records(4)))
        assert parse_csv(serialize_csv(rs)).equivalent(parse_jsonl(serialize_jsonl(rs)))

    def test_order_irrelevant(self):
        recs = make_records(6)
        a = RecordSet(tuple(recs))
        b = RecordSet(tuple(reversed(recs)))
        assert a.equivalent(b)


class TestValidate:
    def test_complete_run_ok(self):
        recs = make_records(100) + make_records(100, split=Split.VALIDATION)
        report = validate(RecordSet(tuple(recs)), need_validation_split=True)
        assert report.ok

    def test_gap_is_error(self):
        recs = [r for r in make_records(100) if r.epoch != 57]
        report = validate(RecordSet(tuple(recs)))
        assert not report.ok
        assert any("57" in msg for _, _, msg in report.errors)

    def test_missing_val_split_names_run(self):
        report = validate(RecordSet(tuple(make_records(3))), need_validation_split=True)
        assert not report.ok
        assert any("run 1" in loc for _, loc, _ in report.errors)

    def test_expected_epochs_mismatch(self):
        report = validate(RecordSet(tuple(make_records(5))), expected_epochs=10)
        assert not report.ok

    def test_out_of_range_is_warning_only(self):
        recs = (ScoreRecord("A", 1, 1, "D", Split.TEST, "loss", 250.0),)
        report = validate(RecordSet(recs))
        assert report.ok
        assert any(sev == "warning" for sev, _, _ in report.findings)

    def test_mixed_metrics_is_error(self):
        recs = (
            ScoreRecord("A", 1, 1, "D", Split.TEST, "top1_acc", 50.0),
            ScoreRecord("A", 2, 1, "D", Split.TEST, "top5_acc", 50.0),
        )
        report = validate(RecordSet(recs))
        assert not report.ok

    def test_pure(self):
        rs = RecordSet(tuple(make_records(4)))
        r1 = validate(rs, need_validation_split=True)
        r2 = validate(rs, need_validation_split=True)
        assert r1.findings == r2.findings
