"""Test-set accuracy per taxonomy category versus the global baseline.

For every threshold-table cell, members of the flavored test set are
classified with the cell's threshold and accuracy is plain correct/n.
Balanced accuracy (mean of per-class recalls) is reported alongside because
small category cells are often class-skewed. Cells with n < LOW_N members
are flagged low-confidence.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Iterable

from .calibration import ThresholdTable, classify, require_ppl
from .corpus import Corpus, LabeledResponse, apply_flavor
from .errors import ConfigError, CoverageError

LOW_N = 3
FORMATS = ("json", "csv", "markdown-table")


@dataclass(frozen=True)
class EvalCell:
    flavor: str
    method: str
    dimension: str
    category: str | None
    threshold: float
    n: int
    correct: int
    accuracy: float
    balanced_accuracy: float
    delta: float
    low_confidence: bool

    def as_dict(self) -> dict:
        return {
            "flavor": self.flavor,
            "method": self.method,
            "dimension": self.dimension,
            "category": self.category,
            "threshold": self.threshold,
            "n": self.n,
            "correct": self.correct,
            "accuracy": self.accuracy,
            "balanced_accuracy": self.balanced_accuracy,
            "delta": self.delta,
            "low_confidence": self.low_confidence,
        }


@dataclass(frozen=True)
class AccuracyReport:
    cells: tuple[EvalCell, ...]
    provenance: dict

    def baselines(self) -> dict[tuple[str, str], float]:
        return {
            (cell.flavor, cell.method): cell.accuracy
            for cell in self.cells
            if cell.dimension == "global"
        }

    def to_json_obj(self) -> dict:
        return {"provenance": self.provenance, "cells": [cell.as_dict() for cell in self.cells]}

    @classmethod
    def from_json_obj(cls, obj: dict) -> "AccuracyReport":
        cells = tuple(
            EvalCell(
                flavor=c["flavor"],
                method=c["method"],
                dimension=c["dimension"],
                category=c["category"],
                threshold=float(c["threshold"]),
                n=int(c["n"]),
                correct=int(c["correct"]),
                accuracy=float(c["accuracy"]),
                balanced_accuracy=float(c["balanced_accuracy"]),
                delta=float(c["delta"]),
                low_confidence=bool(c["low_confidence"]),
            )
            for c in obj["cells"]
        )
        return cls(cells=cells, provenance=dict(obj.get("provenance", {})))


def _accuracy_counts(members: Iterable[LabeledResponse], threshold: float, cache_key: str):
    per_class = {"human": [0, 0], "ai": [0, 0]}  # [correct, total]
    for response in members:
        verdict = classify(require_ppl(response, cache_key), threshold)
        stats = per_class[response.source]
        stats[1] += 1
        if verdict == response.source:
            stats[0] += 1
    correct = per_class["human"][0] + per_class["ai"][0]
    total = per_class["human"][1] + per_class["ai"][1]
    recalls = [c / t for c, t in per_class.values() if t > 0]
    balanced = sum(recalls) / len(recalls) if recalls else 0.0
    return correct, total, balanced


def _category_members(corpus: Corpus, dimension: str, category: str | None) -> list[LabeledResponse]:
    if dimension == "global":
        return list(corpus.responses)
    if dimension == "knowledge":
        return [r for r in corpus.responses if corpus.question_for(r).knowledge == category]
    return [r for r in corpus.responses if category in corpus.question_for(r).cognitive]


def evaluate(test_corpus: Corpus, table: ThresholdTable, cache_key: str) -> AccuracyReport:
    """Score every table cell on the flavored test set; empty cells are skipped.

    The baseline for (flavor, method) is the global cell's accuracy on the
    same flavored test set; category cells report accuracy minus baseline as
    delta. A category cell without a matching global entry is a coverage
    error.
    """
    baselines: dict[tuple[str, str], float] = {}
    flavored_cache: dict[str, Corpus] = {}

    def flavored(flavor: str) -> Corpus:
        if flavor not in flavored_cache:
            flavored_cache[flavor] = apply_flavor(test_corpus, flavor)
        return flavored_cache[flavor]

    for entry in table.entries:
        if entry.dimension != "global":
            continue
        correct, total, _ = _accuracy_counts(flavored(entry.flavor).responses, entry.threshold, cache_key)
        if total > 0:
            baselines[(entry.flavor, entry.method)] = correct / total

    cells: list[EvalCell] = []
    for entry in table.entries:
        members = _category_members(flavored(entry.flavor), entry.dimension, entry.category)
        if not members:
            continue
        if (entry.flavor, entry.method) not in baselines:
            raise CoverageError(
                f"no global baseline for (flavor={entry.flavor}, method={entry.method}); "
                f"cannot report cell {entry.key}"
            )
        baseline = baselines[(entry.flavor, entry.method)]
        correct, total, balanced = _accuracy_counts(members, entry.threshold, cache_key)
        accuracy = correct / total
        cells.append(
            EvalCell(
                flavor=entry.flavor,
                method=entry.method,
                dimension=entry.dimension,
                category=entry.category,
                threshold=entry.threshold,
                n=total,
                correct=correct,
                accuracy=accuracy,
                balanced_accuracy=balanced,
                delta=0.0 if entry.dimension == "global" else accuracy - baseline,
                low_confidence=total < LOW_N,
            )
        )
    return AccuracyReport(cells=tuple(cells), provenance=table.provenance.as_dict())


_COLUMNS = ("flavor", "method", "dimension", "category", "n", "accuracy", "delta", "balanced_accuracy")


def _row(cell: EvalCell) -> list[str]:
    return [
        cell.flavor,
        cell.method,
        cell.dimension,
        cell.category if cell.category is not None else "",
        str(cell.n),
        f"{cell.accuracy:.4f}",
        f"{cell.delta:+.4f}",
        f"{cell.balanced_accuracy:.4f}",
    ]


def emit_report(report: AccuracyReport, format: str) -> str:
    if format == "json":
        return json.dumps(report.to_json_obj(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    if format == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(_COLUMNS)
        for cell in report.cells:
            writer.writerow(_row(cell))
        return buffer.getvalue()
    if format == "markdown-table":
        lines = [
            "| " + " | ".join(_COLUMNS) + " |",
            "|" + "|".join(" --- " for _ in _COLUMNS) + "|",
        ]
        lines.extend("| " + " | ".join(_row(cell)) + " |" for cell in report.cells)
        return "\n".join(lines) + "\n"
    raise ConfigError(f"unknown report format {format!r} (one of {FORMATS})")
