from __future__ import annotations

import shutil
from pathlib import Path

import pytest

from textorigin.corpus import Corpus, IncludeFlags, LabeledResponse, QuestionMeta
from textorigin.scoring import NGramScorer, train_ngram

FIXTURE_CORPUS = Path(__file__).parent / "fixtures" / "corpus.jsonl"

TRAINING_DOCS = [
    "It is important to note that this topic has several key aspects to consider.",
    "Additionally, there are many factors that can influence the outcome in practice.",
    "In conclusion, a careful and balanced approach is essential for a good result.",
    "An operating system scheduler allocates processor time among competing processes.",
    "A linked list is a linear data structure where elements are stored in nodes.",
    "Phishing is a technique used to obtain sensitive information through deception.",
]


@pytest.fixture(scope="session")
def fixture_corpus_path() -> Path:
    return FIXTURE_CORPUS


@pytest.fixture()
def tmp_corpus_path(tmp_path: Path) -> Path:
    """Writable copy, for tests that mutate the corpus file (cache write-back)."""
    dest = tmp_path / "corpus.jsonl"
    shutil.copy(FIXTURE_CORPUS, dest)
    return dest


# repetition drives the counts well above the smoothing constant, so text
# resembling the training docs lands at single-digit perplexity
TRAIN_REPEATS = 50


def build_model():
    return train_ngram(TRAINING_DOCS * TRAIN_REPEATS, order=3, smoothing_k=1.0)


@pytest.fixture(scope="session")
def trained_scorer() -> NGramScorer:
    return NGramScorer(build_model())


def make_question(question_id: str, knowledge: str = "factual", cognitive=(), **flags) -> QuestionMeta:
    return QuestionMeta(
        question_id=question_id,
        knowledge=knowledge,
        cognitive=frozenset(cognitive),
        flags=IncludeFlags(**flags),
    )


def make_response(rid: str, source: str, ppl: float | None = None, cache_key: str = "k",
                  question_id: str = "q", text: str = "some answer text") -> LabeledResponse:
    return LabeledResponse(
        id=rid,
        question_id=question_id,
        course="course",
        text=text,
        source=source,
        ppl_cache={cache_key: ppl} if ppl is not None else {},
    )


def scored_corpus(pairs, cache_key: str = "k") -> Corpus:
    """Corpus of (source, ppl) pairs cached under cache_key, one shared question."""
    responses = [
        make_response(f"r{i:04d}", source, ppl, cache_key) for i, (source, ppl) in enumerate(pairs)
    ]
    return Corpus(responses=tuple(responses), questions={"q": make_question("q")})
