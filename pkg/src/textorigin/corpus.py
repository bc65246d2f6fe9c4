"""Labeled homework corpus: data model, JSON-Lines I/O, flavors, splitting.

A corpus file interleaves two record kinds, one JSON object per line:

    {"kind": "question", "question_id": str, "knowledge": str,
     "cognitive": [str, ...], "flags": {"math": bool, "code": bool,
     "author_book": bool, "trick": bool}}
    {"kind": "response", "id": str, "question_id": str, "course": str,
     "text": str, "source": "human"|"ai", "ppl_cache": {key: float}?}

Questions carry the taxonomy metadata: exactly one knowledge subcategory,
zero or more cognitive subcategories, four independent boolean flags.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Iterator

from .errors import StratificationError, ValidationError

KNOWLEDGE_DIMS = ("conceptual", "factual", "procedural", "metacognitive")
COGNITIVE_DIMS = ("remember", "understand", "apply", "analyze", "evaluate", "create")
FLAVORS = ("orig", "min250", "no_math", "no_code", "no_math_no_code")
SOURCES = ("human", "ai")

MIN250_CHARS = 250  # inclusive bound, counted in Unicode scalar values


@dataclass(frozen=True)
class IncludeFlags:
    math: bool = False
    code: bool = False
    author_book: bool = False
    trick: bool = False

    def as_dict(self) -> dict:
        return {
            "math": self.math,
            "code": self.code,
            "author_book": self.author_book,
            "trick": self.trick,
        }


@dataclass(frozen=True)
class QuestionMeta:
    question_id: str
    knowledge: str
    cognitive: frozenset[str]
    flags: IncludeFlags


@dataclass(frozen=True)
class LabeledResponse:
    id: str
    question_id: str
    course: str
    text: str
    source: str
    ppl_cache: dict[str, float] = field(default_factory=dict)

    def cached_ppl(self, cache_key: str) -> float | None:
        return self.ppl_cache.get(cache_key)

    def with_cached_ppl(self, cache_key: str, value: float) -> "LabeledResponse":
        return replace(self, ppl_cache={**self.ppl_cache, cache_key: value})


@dataclass(frozen=True)
class Corpus:
    responses: tuple[LabeledResponse, ...]
    questions: dict[str, QuestionMeta]

    def __len__(self) -> int:
        return len(self.responses)

    def __iter__(self) -> Iterator[LabeledResponse]:
        return iter(self.responses)

    def question_for(self, response: LabeledResponse) -> QuestionMeta:
        return self.questions[response.question_id]

    def with_responses(self, responses: Iterable[LabeledResponse]) -> "Corpus":
        return Corpus(responses=tuple(responses), questions=self.questions)


# -- parsing ----------------------------------------------------------------


def _require(record: dict, key: str, line: int):
    if key not in record:
        raise ValidationError("required field missing", line=line, field=key)
    return record[key]


def _require_str(record: dict, key: str, line: int, allow_empty: bool = True) -> str:
    value = _require(record, key, line)
    if not isinstance(value, str):
        raise ValidationError(f"expected string, got {type(value).__name__}", line=line, field=key)
    if not allow_empty and not value:
        raise ValidationError("must be nonempty", line=line, field=key)
    return value


def _parse_question(record: dict, line: int) -> QuestionMeta:
    question_id = _require_str(record, "question_id", line, allow_empty=False)
    knowledge = _require_str(record, "knowledge", line)
    if knowledge not in KNOWLEDGE_DIMS:
        raise ValidationError(
            f"unknown knowledge subcategory {knowledge!r} (must be single-valued, one of {KNOWLEDGE_DIMS})",
            line=line,
            field="knowledge",
        )
    cognitive_raw = _require(record, "cognitive", line)
    if not isinstance(cognitive_raw, list):
        raise ValidationError("expected list", line=line, field="cognitive")
    for entry in cognitive_raw:
        if entry not in COGNITIVE_DIMS:
            raise ValidationError(
                f"unknown cognitive subcategory {entry!r} (one of {COGNITIVE_DIMS})",
                line=line,
                field="cognitive",
            )
    flags_raw = _require(record, "flags", line)
    if not isinstance(flags_raw, dict):
        raise ValidationError("expected object", line=line, field="flags")
    flag_values = {}
    for name in ("math", "code", "author_book", "trick"):
        if name not in flags_raw:
            raise ValidationError("flag missing", line=line, field=f"flags.{name}")
        if not isinstance(flags_raw[name], bool):
            raise ValidationError("flag must be boolean", line=line, field=f"flags.{name}")
        flag_values[name] = flags_raw[name]
    return QuestionMeta(
        question_id=question_id,
        knowledge=knowledge,
        cognitive=frozenset(cognitive_raw),
        flags=IncludeFlags(**flag_values),
    )


def _parse_response(record: dict, line: int) -> LabeledResponse:
    source = _require_str(record, "source", line)
    if source not in SOURCES:
        raise ValidationError(f"unknown source {source!r} (one of {SOURCES})", line=line, field="source")
    cache_raw = record.get("ppl_cache", {})
    if not isinstance(cache_raw, dict):
        raise ValidationError("expected object", line=line, field="ppl_cache")
    cache: dict[str, float] = {}
    for key, value in cache_raw.items():
        if not isinstance(value, (int, float)) or isinstance(value, bool) or not value > 0:
            raise ValidationError("cached perplexity must be positive", line=line, field=f"ppl_cache.{key}")
        cache[str(key)] = float(value)
    return LabeledResponse(
        id=_require_str(record, "id", line, allow_empty=False),
        question_id=_require_str(record, "question_id", line, allow_empty=False),
        course=_require_str(record, "course", line),
        text=_require_str(record, "text", line, allow_empty=False),
        source=source,
        ppl_cache=cache,
    )


def parse_corpus(lines: Iterable[str]) -> Corpus:
    responses: list[LabeledResponse] = []
    response_lines: dict[str, int] = {}
    questions: dict[str, QuestionMeta] = {}
    for line_no, raw in enumerate(lines, start=1):
        stripped = raw.strip()
        if not stripped:
            continue
        try:
            record = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"not valid JSON: {exc.msg}", line=line_no) from exc
        if not isinstance(record, dict):
            raise ValidationError("each line must be a JSON object", line=line_no)
        kind = record.get("kind")
        if kind == "question":
            meta = _parse_question(record, line_no)
            if meta.question_id in questions:
                raise ValidationError(
                    f"duplicate question_id {meta.question_id!r}", line=line_no, field="question_id"
                )
            questions[meta.question_id] = meta
        elif kind == "response":
            response = _parse_response(record, line_no)
            if response.id in response_lines:
                raise ValidationError(f"duplicate response id {response.id!r}", line=line_no, field="id")
            response_lines[response.id] = line_no
            responses.append(response)
        else:
            raise ValidationError(f"unknown record kind {kind!r}", line=line_no, field="kind")
    for response in responses:
        if response.question_id not in questions:
            raise ValidationError(
                f"response {response.id!r} references unknown question_id {response.question_id!r}",
                line=response_lines[response.id],
                field="question_id",
            )
    return Corpus(responses=tuple(responses), questions=questions)


def load_corpus(path: str | Path) -> Corpus:
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"corpus file not found: {path}")
    with path.open(encoding="utf-8") as handle:
        return parse_corpus(handle)


def _question_record(meta: QuestionMeta) -> dict:
    return {
        "kind": "question",
        "question_id": meta.question_id,
        "knowledge": meta.knowledge,
        "cognitive": sorted(meta.cognitive),
        "flags": meta.flags.as_dict(),
    }


def _response_record(response: LabeledResponse) -> dict:
    record = {
        "kind": "response",
        "id": response.id,
        "question_id": response.question_id,
        "course": response.course,
        "text": response.text,
        "source": response.source,
    }
    if response.ppl_cache:
        record["ppl_cache"] = dict(sorted(response.ppl_cache.items()))
    return record


def serialize_corpus(corpus: Corpus) -> str:
    """Canonical byte-stable form: questions sorted by id, then responses in order."""
    lines = [
        json.dumps(_question_record(meta), sort_keys=True, ensure_ascii=False)
        for _, meta in sorted(corpus.questions.items())
    ]
    lines.extend(
        json.dumps(_response_record(response), sort_keys=True, ensure_ascii=False)
        for response in corpus.responses
    )
    return "\n".join(lines) + "\n"


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    Path(path).write_text(serialize_corpus(corpus), encoding="utf-8")


def corpus_digest(corpus: Corpus) -> str:
    return hashlib.sha256(serialize_corpus(corpus).encode("utf-8")).hexdigest()


# -- flavors ----------------------------------------------------------------


def _flavor_predicate(corpus: Corpus, flavor: str) -> Callable[[LabeledResponse], bool]:
    if flavor == "orig":
        return lambda r: True
    if flavor == "min250":
        return lambda r: len(r.text) >= MIN250_CHARS
    if flavor == "no_math":
        return lambda r: not corpus.questions[r.question_id].flags.math
    if flavor == "no_code":
        return lambda r: not corpus.questions[r.question_id].flags.code
    if flavor == "no_math_no_code":
        return lambda r: not (
            corpus.questions[r.question_id].flags.math or corpus.questions[r.question_id].flags.code
        )
    raise ValidationError(f"unknown flavor {flavor!r} (one of {FLAVORS})", field="flavor")


def apply_flavor(corpus: Corpus, flavor: str) -> Corpus:
    """Select the responses a flavor keeps; records are never modified."""
    keep = _flavor_predicate(corpus, flavor)
    return corpus.with_responses(r for r in corpus.responses if keep(r))


# -- splitting ---------------------------------------------------------------


def split(corpus: Corpus, train_fraction: float, seed: int) -> tuple[Corpus, Corpus]:
    """Deterministic stratified-by-source partition into (train, test).

    Within each class, responses are shuffled by a seeded RNG over the
    id-sorted list, so the partition depends only on (ids, seed). The train
    share is rounded half-up and clamped so both halves keep both classes.
    """
    if not 0 < train_fraction < 1:
        raise StratificationError(f"train_fraction must be in (0, 1), got {train_fraction}")
    by_source: dict[str, list[LabeledResponse]] = {source: [] for source in SOURCES}
    for response in corpus.responses:
        by_source[response.source].append(response)
    for source, members in by_source.items():
        if len(members) < 2:
            raise StratificationError(
                f"need at least 2 responses per class to stratify, class {source!r} has {len(members)}"
            )
    rng = random.Random(seed)
    train_ids: set[str] = set()
    for source in SOURCES:
        ordered = sorted(by_source[source], key=lambda r: r.id)
        rng.shuffle(ordered)
        n = len(ordered)
        take = int(n * train_fraction + 0.5)
        take = max(1, min(n - 1, take))
        train_ids.update(r.id for r in ordered[:take])
    train = corpus.with_responses(r for r in corpus.responses if r.id in train_ids)
    test = corpus.with_responses(r for r in corpus.responses if r.id not in train_ids)
    return train, test
