import json

import pytest

from textorigin.calibration import Provenance, ThresholdEntry, ThresholdTable, calibrate_table, classify
from textorigin.corpus import Corpus, load_corpus
from textorigin.errors import ConfigError, CoverageError
from textorigin.evaluation import AccuracyReport, emit_report, evaluate

from conftest import make_question, make_response

KEY = "k"


def table_of(*entries: ThresholdEntry) -> ThresholdTable:
    return ThresholdTable(entries=entries, provenance=Provenance(corpus_sha256="test"))


def knowledge_corpus() -> Corpus:
    """2 knowledge categories, separable everywhere: human >= 25, ai <= 12."""
    questions = {
        "qf": make_question("qf", knowledge="factual"),
        "qm": make_question("qm", knowledge="metacognitive"),
    }
    responses = (
        make_response("f-h1", "human", 30.0, KEY, question_id="qf"),
        make_response("f-h2", "human", 25.0, KEY, question_id="qf"),
        make_response("f-a1", "ai", 10.0, KEY, question_id="qf"),
        make_response("f-a2", "ai", 12.0, KEY, question_id="qf"),
        make_response("m-h1", "human", 60.0, KEY, question_id="qm"),
        make_response("m-h2", "human", 75.0, KEY, question_id="qm"),
        make_response("m-a1", "ai", 9.0, KEY, question_id="qm"),
        make_response("m-a2", "ai", 11.0, KEY, question_id="qm"),
    )
    return Corpus(responses=responses, questions=questions)


GLOBAL = ThresholdEntry("orig", "auc", "global", None, 19.0, 1.0)
FACTUAL = ThresholdEntry("orig", "auc", "knowledge", "factual", 18.0, 1.0)
META = ThresholdEntry("orig", "auc", "knowledge", "metacognitive", 20.0, 1.0)


class TestEvaluate:
    def test_separable_fixture_all_perfect(self):
        report = evaluate(knowledge_corpus(), table_of(GLOBAL, FACTUAL, META), KEY)
        assert len(report.cells) == 3
        for cell in report.cells:
            assert cell.accuracy == 1.0
            assert cell.balanced_accuracy == 1.0
            assert cell.delta == 0.0

    def test_metacognitive_extremes_perfect_cell(self):
        # humans with extreme ppl (>= 60) and ai <= 12 classify perfectly even
        # when the shared threshold misreads part of the factual cell
        table = table_of(
            ThresholdEntry("orig", "auc", "global", None, 26.0, 1.0),
            ThresholdEntry("orig", "auc", "knowledge", "metacognitive", 26.0, 1.0),
            ThresholdEntry("orig", "auc", "knowledge", "factual", 26.0, 1.0),
        )
        report = evaluate(knowledge_corpus(), table, KEY)
        by_cat = {cell.category: cell for cell in report.cells}
        assert by_cat["metacognitive"].accuracy == 1.0
        assert by_cat["factual"].accuracy == 0.75  # the 25.0 human falls below 26
        assert by_cat[None].accuracy == 0.875
        assert by_cat["metacognitive"].delta == pytest.approx(0.125)

    def test_single_response_category_flagged_low_n(self):
        questions = {
            "qf": make_question("qf", knowledge="factual"),
            "qp": make_question("qp", knowledge="procedural"),
        }
        responses = (
            make_response("h1", "human", 30.0, KEY, question_id="qf"),
            make_response("a1", "ai", 10.0, KEY, question_id="qf"),
            make_response("p1", "human", 30.0, KEY, question_id="qp"),
        )
        corpus = Corpus(responses=responses, questions=questions)
        table = table_of(GLOBAL, ThresholdEntry("orig", "auc", "knowledge", "procedural", 19.0, 1.0))
        report = evaluate(corpus, table, KEY)
        cell = next(c for c in report.cells if c.category == "procedural")
        assert cell.n == 1
        assert cell.accuracy in (0.0, 1.0)
        assert cell.low_confidence

    def test_category_equal_to_global_has_zero_delta(self):
        table = table_of(GLOBAL, ThresholdEntry("orig", "auc", "knowledge", "factual", 19.0, 1.0))
        report = evaluate(knowledge_corpus(), table, KEY)
        cell = next(c for c in report.cells if c.category == "factual")
        assert cell.delta == 0.0

    def test_accuracy_matches_brute_force_recount(self):
        corpus = knowledge_corpus()
        table = table_of(GLOBAL, FACTUAL, META)
        report = evaluate(corpus, table, KEY)
        for cell in report.cells:
            members = [
                r for r in corpus.responses
                if cell.category is None or corpus.question_for(r).knowledge == cell.category
            ]
            correct = sum(
                1 for r in members if classify(r.ppl_cache[KEY], cell.threshold) == r.source
            )
            assert cell.n == len(members)
            assert cell.accuracy == correct / len(members)

    def test_weighted_mean_of_knowledge_cells_equals_composite_accuracy(self):
        corpus = knowledge_corpus()
        table = table_of(
            ThresholdEntry("orig", "auc", "global", None, 26.0, 1.0),
            ThresholdEntry("orig", "auc", "knowledge", "factual", 18.0, 1.0),
            ThresholdEntry("orig", "auc", "knowledge", "metacognitive", 40.0, 1.0),
        )
        report = evaluate(corpus, table, KEY)
        knowledge_cells = [c for c in report.cells if c.dimension == "knowledge"]
        weighted = sum(c.accuracy * c.n for c in knowledge_cells) / sum(c.n for c in knowledge_cells)
        # independent composite classifier: each response judged by its own category threshold
        thresholds = {"factual": 18.0, "metacognitive": 40.0}
        correct = sum(
            1 for r in corpus.responses
            if classify(r.ppl_cache[KEY], thresholds[corpus.question_for(r).knowledge]) == r.source
        )
        assert weighted == pytest.approx(correct / len(corpus.responses), abs=1e-12)

    def test_missing_global_baseline_is_coverage_error(self):
        with pytest.raises(CoverageError):
            evaluate(knowledge_corpus(), table_of(FACTUAL), KEY)

    def test_empty_cells_skipped(self):
        table = table_of(GLOBAL, ThresholdEntry("orig", "auc", "knowledge", "conceptual", 19.0, 1.0))
        report = evaluate(knowledge_corpus(), table, KEY)
        assert all(cell.category != "conceptual" for cell in report.cells)


class TestEmit:
    def make_report(self) -> AccuracyReport:
        return evaluate(knowledge_corpus(), table_of(GLOBAL, FACTUAL, META), KEY)

    def test_json_roundtrip(self):
        report = self.make_report()
        again = AccuracyReport.from_json_obj(json.loads(emit_report(report, "json")))
        assert again == report

    def test_csv_shape(self):
        report = self.make_report()
        lines = emit_report(report, "csv").strip().split("\n")
        assert len(lines) == len(report.cells) + 1
        assert lines[0] == "flavor,method,dimension,category,n,accuracy,delta,balanced_accuracy"

    def test_markdown_column_order_and_decimals(self):
        report = self.make_report()
        lines = emit_report(report, "markdown-table").strip().split("\n")
        assert lines[0].startswith("| flavor | method | dimension | category | n | accuracy | delta |")
        assert "1.0000" in lines[2]

    def test_provenance_included(self):
        obj = json.loads(emit_report(self.make_report(), "json"))
        assert obj["provenance"]["corpus_sha256"] == "test"

    def test_unknown_format(self):
        with pytest.raises(ConfigError):
            emit_report(self.make_report(), "yaml")


def test_full_calibrate_then_evaluate_deltas(fixture_corpus_path):
    corpus = load_corpus(fixture_corpus_path)
    scored = corpus.with_responses(
        r.with_cached_ppl(KEY, 31.0 if r.source == "human" else 9.0) for r in corpus.responses
    )
    table = calibrate_table(scored, KEY)
    report = evaluate(scored, table, KEY)
    assert all(cell.accuracy == 1.0 for cell in report.cells)
    assert all(cell.delta == 0.0 for cell in report.cells)
