"""
Tests for the per-record pipeline and the scoring reports.
"""

import pytest

from astkit.config import AstkitConfig, FrontendConfig, PathConfig
from astkit.corpus import CorpusRecord
from astkit.errors import ConfigurationError
from astkit.metrics import ClassifierRun, RankedRun
from astkit.pipeline import (
    TRANSFORMS,
    characterize_pairs,
    characterize_texts,
    histogram_report,
    process_record,
    run_records,
    score_clone,
    score_search,
    score_summarization,
    stats_frame,
    stats_summary,
    transform_record,
)
from tests.helpers import requires_java

E1_SEXPR = '(A (B "x") (C "y" "z"))'


@pytest.fixture
def tree_records():
    return [
        CorpusRecord(id="t2", tree='(P "a" "b" "c")'),
        CorpusRecord(id="t1", tree=E1_SEXPR),
    ]


class TestTransforms:
    """Transforms on pre-parsed trees."""

    def test_sbt(self, config):
        row = transform_record(CorpusRecord(id="e1", tree=E1_SEXPR), "sbt", config)
        assert row == {"id": "e1", "sbt": "( A ( B ( x ) x ) B ( C ( y ) y ( z ) z ) C ) A"}

    def test_sbt_without_tokens(self, config):
        row = transform_record(CorpusRecord(id="e1", tree=E1_SEXPR), "sbt-notok", config)
        assert "x" not in row["sbt"].split()
        assert row["sbt"].count("<mask>") == 6

    def test_token_and_masked_sbt(self, config):
        row = transform_record(CorpusRecord(id="e1", tree=E1_SEXPR), "token-sbt-notok", config)
        assert row["tokens"] == "x y z"
        assert "<mask>" in row["sbt"]

    def test_bfs(self, config):
        row = transform_record(CorpusRecord(id="e1", tree=E1_SEXPR), "bfs", config)
        assert row["bfs"] == "A B C x y z"

    def test_path(self, config):
        row = transform_record(CorpusRecord(id="e1", tree=E1_SEXPR), "path", config)
        assert len(row["contexts"]) == 3
        assert row["contexts"][2] == "y\ty ^ C _ z\tz"

    def test_path_respects_config(self):
        config = AstkitConfig(paths=PathConfig(max_length=2), jobs=1)
        row = transform_record(CorpusRecord(id="e1", tree=E1_SEXPR), "path", config)
        assert len(row["contexts"]) == 1

    def test_binary(self, config):
        row = transform_record(CorpusRecord(id="p", tree='(P "x" "y" "z")'), "binary", config)
        assert row["tree"] == '(P "x" (<grp> "y" "z"))'

    def test_raw_round_trips(self, config):
        row = transform_record(CorpusRecord(id="e1", tree=E1_SEXPR), "raw", config)
        assert row["tree"] == E1_SEXPR

    def test_split_needs_code(self, config):
        result = process_record(CorpusRecord(id="e1", tree=E1_SEXPR), "transform", config, method="split")
        assert result.row is None
        assert result.error["error"] == "InputError"

    def test_all_transform_names_known(self, config):
        for method in TRANSFORMS:
            if method == "split":
                continue
            assert transform_record(CorpusRecord(id="e1", tree=E1_SEXPR), method, config)["id"] == "e1"


class TestRunRecords:
    """Tests for the driver."""

    def test_sorted_by_id(self, tree_records, config):
        rows, errors = run_records(tree_records, "transform", config, method="bfs", quiet=True)
        assert [r["id"] for r in rows] == ["t1", "t2"]
        assert errors == []

    def test_errors_become_rows(self, config):
        records = [CorpusRecord(id="ok", tree=E1_SEXPR), CorpusRecord(id="bad", tree="(A")]
        rows, errors = run_records(records, "parse", config, quiet=True)
        assert [r["id"] for r in rows] == ["ok"]
        assert errors[0]["id"] == "bad"
        assert errors[0]["error"] == "TreeFormatError"

    def test_every_id_accounted_for(self, tree_records, config):
        records = tree_records + [CorpusRecord(id="t0", tree="broken")]
        rows, errors = run_records(records, "relmat", config, quiet=True)
        assert sorted(r["id"] for r in rows + errors) == ["t0", "t1", "t2"]

    def test_stats(self, tree_records, config):
        rows, _ = run_records(tree_records, "stats", config, quiet=True)
        frame = stats_frame(rows)
        assert list(frame.columns) == ["id", "size", "depth", "branching", "unique_types", "unique_tokens"]
        assert frame.loc[frame["id"] == "t1", "size"].item() == 6
        summary = stats_summary(rows, 0)
        assert summary["count"] == 2
        assert summary["errors"] == 0

    def test_stats_summary_empty(self):
        assert stats_summary([], 3) == {"errors": 3, "count": 0}

    def test_unexpected_exceptions_become_rows(self, tree_records, config, monkeypatch):
        def explode(record, method, config):
            raise RecursionError("maximum recursion depth exceeded")

        monkeypatch.setattr("astkit.pipeline.transform_record", explode)
        result = process_record(tree_records[0], "transform", config, method="sbt")
        assert result.row is None
        assert result.error == {
            "id": "t2", "error": "RecursionError", "message": "maximum recursion depth exceeded",
        }

    def test_relmat_uses_max_distance(self, tree_records):
        config = AstkitConfig(max_distance=1, jobs=1)
        rows, _ = run_records(tree_records, "relmat", config, quiet=True)
        e1 = next(r for r in rows if r["id"] == "t1")
        assert e1["coo"].startswith("# nodes=6 P=1")
        assert "A 0 2 2" not in e1["coo"]

    @requires_java
    def test_configuration_errors_propagate(self, tmp_path):
        config = AstkitConfig(frontend=FrontendConfig(grammar_dir=str(tmp_path)), jobs=1)
        with pytest.raises(ConfigurationError):
            process_record(CorpusRecord(id="c", code="int f() { return 1; }"), "parse", config)

    @requires_java
    @pytest.mark.integration
    @pytest.mark.slow
    def test_worker_count_does_not_change_output(self, method_records):
        records = [CorpusRecord.from_json(r) for r in method_records[:60]]
        serial, _ = run_records(records, "transform", AstkitConfig(jobs=1), method="sbt", quiet=True)
        parallel, _ = run_records(records, "transform", AstkitConfig(jobs=2), method="sbt", quiet=True)
        assert serial == parallel


class TestCharacterization:
    """Tests for the characterization drivers."""

    def test_pairs(self, config):
        records = {
            "a": CorpusRecord(id="a", code="int sum(int a, int b)"),
            "b": CorpusRecord(id="b", code="int sum(int c)"),
        }
        rows, errors = characterize_pairs(records, [("a", "b"), ("a", "zzz")], config, quiet=True)
        assert rows == [{"id": "a:b", "metric": "jaccard", "value": pytest.approx(2 / 5)}]
        assert errors[0]["id"] == "a:zzz"

    def test_texts(self, config):
        records = [
            CorpusRecord(id="a", code="int sum(int x)", summary="compute sum"),
            CorpusRecord(id="b", code="int f()", summary=None),
            CorpusRecord(id="c", code="int f()", summary="..."),
        ]
        rows, errors = characterize_texts(records, "summary", config, quiet=True)
        assert rows == [{"id": "a", "metric": "ease", "value": 0.5}]
        assert [e["id"] for e in errors] == ["b", "c"]

    def test_histogram_report(self):
        report = histogram_report([{"value": 0.1}, {"value": 0.2}, {"value": 0.2}], [0, 0.15, 0.3])
        assert [b["count"] for b in report["bins"]] == [1, 2]


class TestScoring:
    """Tests for the score reports."""

    def test_clone(self):
        run = ClassifierRun(("p1", "p2", "p3", "p4"), (0.9, 0.8, 0.2, 0.1), (1, 1, 0, 0))
        report = score_clone(run)
        assert report["best_threshold"] == pytest.approx(0.21)
        assert report["best_f1"] == 1.0
        assert report["comparison"] == ">="

    def test_clone_fixed_threshold(self):
        run = ClassifierRun(("p1", "p2", "p3", "p4"), (0.9, 0.8, 0.2, 0.1), (1, 1, 0, 0))
        report = score_clone(run, threshold=0.85)
        assert report["threshold"] == 0.85
        assert report["recall"] == 0.5

    def test_search(self):
        report = score_search(RankedRun(("q1", "q2", "q3"), (1, 2, 4)))
        assert report["mrr"] == pytest.approx(0.583333, abs=1e-6)
        assert report["sr@1"] == pytest.approx(1 / 3)
        assert report["sr@5"] == 1.0

    def test_summarization(self):
        rows = [("s1", ["a", "b", "c", "d"], ["a", "b", "c", "d"])]
        report = score_summarization(rows)
        assert report["bleu"] == pytest.approx(1.0)
        assert report["rouge_l"] == pytest.approx(1.0)
        assert report["meteor"] == pytest.approx(1 - 0.5 * (1 / 4) ** 3)
