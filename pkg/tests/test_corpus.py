import json

import pytest

from textorigin.corpus import (
    apply_flavor,
    corpus_digest,
    load_corpus,
    parse_corpus,
    save_corpus,
    split,
)
from textorigin.errors import StratificationError, ValidationError

from conftest import scored_corpus


def record_lines(*records: dict) -> list[str]:
    return [json.dumps(r) for r in records]

QUESTION = {
    "kind": "question",
    "question_id": "q1",
    "knowledge": "factual",
    "cognitive": ["remember"],
    "flags": {"math": False, "code": False, "author_book": False, "trick": False},
}
RESPONSE = {
    "kind": "response",
    "id": "r1",
    "question_id": "q1",
    "course": "c",
    "text": "an answer",
    "source": "human",
}


class TestLoad:
    def test_fixture_happy_path(self, fixture_corpus_path):
        corpus = load_corpus(fixture_corpus_path)
        assert len(corpus.responses) == 24
        assert len(corpus.questions) == 12
        assert {r.source for r in corpus} == {"human", "ai"}

    def test_missing_file(self, tmp_path):
        with pytest.raises(ValidationError):
            load_corpus(tmp_path / "nope.jsonl")

    def test_multi_valued_knowledge_rejected(self):
        bad = dict(QUESTION, knowledge="conceptual,factual")
        with pytest.raises(ValidationError) as exc_info:
            parse_corpus(record_lines(bad))
        assert exc_info.value.line == 1
        assert exc_info.value.field == "knowledge"

    def test_dangling_question_id_names_the_response(self):
        orphan = dict(RESPONSE, question_id="missing")
        with pytest.raises(ValidationError) as exc_info:
            parse_corpus(record_lines(QUESTION, orphan))
        assert "r1" in str(exc_info.value)
        assert exc_info.value.line == 2

    def test_duplicate_response_id(self):
        with pytest.raises(ValidationError) as exc_info:
            parse_corpus(record_lines(QUESTION, RESPONSE, RESPONSE))
        assert exc_info.value.line == 3

    def test_duplicate_question_id(self):
        with pytest.raises(ValidationError):
            parse_corpus(record_lines(QUESTION, QUESTION))

    def test_unknown_source(self):
        bad = dict(RESPONSE, source="robot")
        with pytest.raises(ValidationError) as exc_info:
            parse_corpus(record_lines(QUESTION, bad))
        assert exc_info.value.field == "source"

    def test_unknown_cognitive_value(self):
        bad = dict(QUESTION, cognitive=["remember", "meditate"])
        with pytest.raises(ValidationError):
            parse_corpus(record_lines(bad))

    def test_missing_flag(self):
        bad = dict(QUESTION, flags={"math": False, "code": False, "author_book": False})
        with pytest.raises(ValidationError) as exc_info:
            parse_corpus(record_lines(bad))
        assert exc_info.value.field == "flags.trick"

    def test_empty_text_rejected(self):
        bad = dict(RESPONSE, text="")
        with pytest.raises(ValidationError):
            parse_corpus(record_lines(QUESTION, bad))

    def test_unknown_kind_and_bad_json(self):
        with pytest.raises(ValidationError):
            parse_corpus(['{"kind": "mystery"}'])
        with pytest.raises(ValidationError) as exc_info:
            parse_corpus(["{not json"])
        assert exc_info.value.line == 1

    def test_negative_cached_ppl_rejected(self):
        bad = dict(RESPONSE, ppl_cache={"key": -3.0})
        with pytest.raises(ValidationError):
            parse_corpus(record_lines(QUESTION, bad))

    def test_blank_lines_skipped(self):
        corpus = parse_corpus(record_lines(QUESTION) + ["", "   "] + record_lines(RESPONSE))
        assert len(corpus.responses) == 1


class TestRoundTrip:
    def test_load_serialize_load(self, fixture_corpus_path, tmp_path):
        corpus = load_corpus(fixture_corpus_path)
        out = tmp_path / "copy.jsonl"
        save_corpus(corpus, out)
        again = load_corpus(out)
        assert again == corpus
        assert corpus_digest(again) == corpus_digest(corpus)

    def test_cache_survives_roundtrip(self, tmp_path):
        corpus = parse_corpus(record_lines(QUESTION, dict(RESPONSE, ppl_cache={"abc": 12.5})))
        out = tmp_path / "c.jsonl"
        save_corpus(corpus, out)
        assert load_corpus(out).responses[0].cached_ppl("abc") == 12.5


class TestFlavors:
    def test_hand_listed_subsets(self, fixture_corpus_path):
        corpus = load_corpus(fixture_corpus_path)
        ids = lambda c: {r.id for r in c}
        everything = ids(corpus)
        assert ids(apply_flavor(corpus, "orig")) == everything
        # q01-human is the single 249-character text
        assert ids(apply_flavor(corpus, "min250")) == everything - {"q01-human"}
        math_ids = {"q04-human", "q04-ai", "q07-human", "q07-ai"}
        code_ids = {"q05-human", "q05-ai", "q08-human", "q08-ai"}
        assert ids(apply_flavor(corpus, "no_math")) == everything - math_ids
        assert ids(apply_flavor(corpus, "no_code")) == everything - code_ids
        assert ids(apply_flavor(corpus, "no_math_no_code")) == everything - math_ids - code_ids

    def test_249_vs_250_boundary(self, fixture_corpus_path):
        corpus = load_corpus(fixture_corpus_path)
        lengths = {r.id: len(r.text) for r in corpus}
        assert lengths["q01-human"] == 249
        assert lengths["q01-ai"] == 250
        kept = {r.id for r in apply_flavor(corpus, "min250")}
        assert "q01-human" not in kept
        assert "q01-ai" in kept

    def test_math_only_question_flag_logic(self, fixture_corpus_path):
        corpus = load_corpus(fixture_corpus_path)
        # q04 is math=true code=false
        for flavor, expected in (("no_math", False), ("no_math_no_code", False), ("no_code", True)):
            present = any(r.id == "q04-human" for r in apply_flavor(corpus, flavor))
            assert present is expected

    def test_filters_commute(self, fixture_corpus_path):
        corpus = load_corpus(fixture_corpus_path)
        a = {r.id for r in apply_flavor(corpus, "no_math_no_code")}
        b = {r.id for r in apply_flavor(apply_flavor(corpus, "no_math"), "no_code")}
        c = {r.id for r in apply_flavor(apply_flavor(corpus, "no_code"), "no_math")}
        assert a == b == c

    def test_every_flavor_is_subset_of_orig(self, fixture_corpus_path):
        corpus = load_corpus(fixture_corpus_path)
        everything = {r.id for r in corpus}
        for flavor in ("orig", "min250", "no_math", "no_code", "no_math_no_code"):
            flavored = apply_flavor(corpus, flavor)
            assert {r.id for r in flavored} <= everything
            # selection, not mutation: surviving records are the same objects
            by_id = {r.id: r for r in corpus}
            assert all(r is by_id[r.id] for r in flavored)

    def test_unknown_flavor(self, fixture_corpus_path):
        with pytest.raises(ValidationError):
            apply_flavor(load_corpus(fixture_corpus_path), "extra_crispy")


class TestSplit:
    def test_exact_stratification(self):
        corpus = scored_corpus([("human", 30.0)] * 100 + [("ai", 10.0)] * 100)
        train, test = split(corpus, 0.9, seed=1)
        count = lambda c, s: sum(1 for r in c if r.source == s)
        assert count(train, "human") == 90 and count(train, "ai") == 90
        assert count(test, "human") == 10 and count(test, "ai") == 10

    def test_deterministic_under_seed(self):
        corpus = scored_corpus([("human", 30.0)] * 20 + [("ai", 10.0)] * 20)
        first = split(corpus, 0.8, seed=7)
        second = split(corpus, 0.8, seed=7)
        assert [r.id for r in first[0]] == [r.id for r in second[0]]
        different = split(corpus, 0.8, seed=8)
        assert [r.id for r in first[0]] != [r.id for r in different[0]]

    def test_partition_law(self, fixture_corpus_path):
        corpus = load_corpus(fixture_corpus_path)
        train, test = split(corpus, 0.75, seed=3)
        train_ids = {r.id for r in train}
        test_ids = {r.id for r in test}
        assert train_ids | test_ids == {r.id for r in corpus}
        assert train_ids & test_ids == set()

    def test_both_classes_in_both_halves(self):
        corpus = scored_corpus([("human", 30.0)] * 3 + [("ai", 10.0)] * 3)
        train, test = split(corpus, 0.9, seed=0)
        assert {r.source for r in train} == {"human", "ai"}
        assert {r.source for r in test} == {"human", "ai"}

    def test_too_few_per_class(self):
        corpus = scored_corpus([("human", 30.0), ("human", 25.0), ("ai", 10.0)])
        with pytest.raises(StratificationError):
            split(corpus, 0.9, seed=0)

    def test_bad_fraction(self):
        corpus = scored_corpus([("human", 30.0)] * 2 + [("ai", 10.0)] * 2)
        for fraction in (0.0, 1.0, -0.5, 1.5):
            with pytest.raises(StratificationError):
                split(corpus, fraction, seed=0)
