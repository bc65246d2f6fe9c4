"""Threshold calibration from a scored corpus.

The classifier is a hard cutoff on perplexity: values below the threshold
are called AI-generated, values at or above it human-written (an accusation
requires strictly crossing the cutoff). The positive class throughout is
human-written.

A hard cutoff yields a single operating point, so the ROC curve is the
three-point polyline (0,0) - (fpr,tpr) - (1,1) and its area reduces to
(1 + tpr - fpr) / 2. Thresholds are chosen by sweeping a fixed grid and
keeping the smallest grid point that maximizes the objective (AUC or F1).
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import COGNITIVE_DIMS, FLAVORS, KNOWLEDGE_DIMS, Corpus, LabeledResponse, apply_flavor
from .errors import (
    ConfigError,
    CoverageError,
    NumericError,
    StaleCacheError,
    UndefinedMetricError,
    ValidationError,
)

log = logging.getLogger(__name__)

METHODS = ("auc", "f1")
DIMENSIONS = ("global", "knowledge", "cognitive")
DEFAULT_GRID = (0.0, 100.0, 0.5)

# grid is either (lo, hi, step) or an explicit sequence of thresholds
GridSpec = "tuple[float, float, float] | Sequence[float]"


def classify(ppl: float, threshold: float) -> str:
    """ai below the threshold, human at or above it."""
    if not (math.isfinite(ppl) and math.isfinite(threshold)):
        raise NumericError(f"non-finite input: ppl={ppl!r}, threshold={threshold!r}")
    return "ai" if ppl < threshold else "human"


def require_ppl(response: LabeledResponse, cache_key: str) -> float:
    value = response.cached_ppl(cache_key)
    if value is None:
        raise StaleCacheError(response.id, cache_key)
    return value


@dataclass(frozen=True)
class ConfusionCounts:
    """Positive class = human-written."""

    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def tpr(self) -> float:
        if self.tp + self.fn == 0:
            raise UndefinedMetricError("no actual positives: TPR undefined")
        return self.tp / (self.tp + self.fn)

    @property
    def fpr(self) -> float:
        if self.fp + self.tn == 0:
            raise UndefinedMetricError("no actual negatives: FPR undefined")
        return self.fp / (self.fp + self.tn)


@dataclass(frozen=True)
class RocPoint:
    fpr: float
    tpr: float
    threshold: float


def confusion(responses: Iterable[LabeledResponse], threshold: float, cache_key: str) -> ConfusionCounts:
    tp = fp = tn = fn = 0
    for response in responses:
        predicted = classify(require_ppl(response, cache_key), threshold)
        if response.source == "human":
            if predicted == "human":
                tp += 1
            else:
                fn += 1
        else:
            if predicted == "human":
                fp += 1
            else:
                tn += 1
    return ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn)


def roc_point(counts: ConfusionCounts, threshold: float) -> RocPoint:
    return RocPoint(fpr=counts.fpr, tpr=counts.tpr, threshold=threshold)


def auc_single_point(counts: ConfusionCounts) -> float:
    """Area under (0,0) - (fpr,tpr) - (1,1); closed form (1 + tpr - fpr) / 2."""
    return (1.0 + counts.tpr - counts.fpr) / 2.0


def f1_score(counts: ConfusionCounts) -> float:
    denom = 2 * counts.tp + counts.fp + counts.fn
    if denom == 0:
        raise UndefinedMetricError("tp + fp + fn = 0: F1 undefined")
    return 2 * counts.tp / denom


_OBJECTIVES = {"auc": auc_single_point, "f1": f1_score}


def grid_points(grid) -> list[float]:
    """Materialize a (lo, hi, step) range or pass an explicit point list through."""
    if isinstance(grid, tuple) and len(grid) == 3:
        lo, hi, step = (float(v) for v in grid)
        if step <= 0:
            raise ConfigError(f"grid step must be > 0, got {step}")
        if hi < lo:
            raise ConfigError(f"grid hi {hi} below lo {lo}")
        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        return [lo + i * step for i in range(count)]
    points = [float(v) for v in grid]
    if not points:
        raise ConfigError("threshold grid is empty")
    return points


def optimal_threshold(
    responses: Sequence[LabeledResponse],
    method: str,
    cache_key: str,
    grid=DEFAULT_GRID,
) -> tuple[float, float, list[tuple[float, float]]]:
    """Sweep the grid; return (threshold, objective, per-point trace).

    Ties resolve to the smallest threshold attaining the maximum.
    """
    if method not in _OBJECTIVES:
        raise ConfigError(f"unknown method {method!r} (one of {METHODS})")
    objective_fn = _OBJECTIVES[method]
    trace = [
        (point, objective_fn(confusion(responses, point, cache_key)))
        for point in grid_points(grid)
    ]
    best_threshold, best_value = trace[0]
    for point, value in trace[1:]:
        if value > best_value:
            best_threshold, best_value = point, value
    return best_threshold, best_value, trace


# -- threshold table ----------------------------------------------------------


@dataclass(frozen=True)
class ThresholdEntry:
    flavor: str
    method: str
    dimension: str
    category: str | None
    threshold: float
    objective: float

    @property
    def key(self) -> tuple[str, str, str, str | None]:
        return (self.flavor, self.method, self.dimension, self.category)

    def as_dict(self) -> dict:
        return {
            "flavor": self.flavor,
            "method": self.method,
            "dimension": self.dimension,
            "category": self.category,
            "threshold": self.threshold,
            "objective": self.objective,
        }


@dataclass(frozen=True)
class Provenance:
    scorer: dict = field(default_factory=dict)
    engine_config: dict = field(default_factory=dict)
    corpus_sha256: str = ""
    grid: dict = field(default_factory=dict)
    warnings: tuple[str, ...] = ()
    created_at: str | None = None  # omitted by the pipeline so artifacts stay byte-stable

    def as_dict(self) -> dict:
        out = {
            "scorer": self.scorer,
            "engine_config": self.engine_config,
            "corpus_sha256": self.corpus_sha256,
            "grid": self.grid,
            "warnings": list(self.warnings),
        }
        if self.created_at is not None:
            out["created_at"] = self.created_at
        return out

    @classmethod
    def from_dict(cls, obj: dict) -> "Provenance":
        return cls(
            scorer=dict(obj.get("scorer", {})),
            engine_config=dict(obj.get("engine_config", {})),
            corpus_sha256=str(obj.get("corpus_sha256", "")),
            grid=dict(obj.get("grid", {})),
            warnings=tuple(obj.get("warnings", ())),
            created_at=obj.get("created_at"),
        )


@dataclass(frozen=True)
class ThresholdTable:
    entries: tuple[ThresholdEntry, ...]
    provenance: Provenance = field(default_factory=Provenance)

    def __post_init__(self) -> None:
        seen = set()
        for entry in self.entries:
            if entry.key in seen:
                raise ValidationError(f"duplicate threshold entry for {entry.key}")
            seen.add(entry.key)

    def lookup(self, flavor: str, method: str, dimension: str = "global", category: str | None = None) -> ThresholdEntry:
        for entry in self.entries:
            if entry.key == (flavor, method, dimension, category):
                return entry
        raise CoverageError(f"no threshold for (flavor={flavor}, method={method}, dimension={dimension}, category={category})")

    def to_json_obj(self) -> dict:
        return {
            "provenance": self.provenance.as_dict(),
            "entries": [entry.as_dict() for entry in self.entries],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def from_json_obj(cls, obj: dict) -> "ThresholdTable":
        try:
            entries = tuple(
                ThresholdEntry(
                    flavor=str(e["flavor"]),
                    method=str(e["method"]),
                    dimension=str(e["dimension"]),
                    category=e["category"] if e["category"] is None else str(e["category"]),
                    threshold=float(e["threshold"]),
                    objective=float(e["objective"]),
                )
                for e in obj["entries"]
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed threshold table: {exc}") from exc
        return cls(entries=entries, provenance=Provenance.from_dict(obj.get("provenance", {})))

    @classmethod
    def load(cls, path: str | Path) -> "ThresholdTable":
        try:
            obj = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ValidationError(f"threshold table not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ValidationError(f"threshold table is not valid JSON: {exc}") from exc
        return cls.from_json_obj(obj)


def _category_members(corpus: Corpus, dimension: str, category: str | None) -> list[LabeledResponse]:
    if dimension == "global":
        return list(corpus.responses)
    if dimension == "knowledge":
        return [r for r in corpus.responses if corpus.question_for(r).knowledge == category]
    if dimension == "cognitive":
        # multi-label: a response joins every cognitive group its question carries
        return [r for r in corpus.responses if category in corpus.question_for(r).cognitive]
    raise ConfigError(f"unknown dimension {dimension!r} (one of {DIMENSIONS})")


def _categories(dimension: str) -> tuple[str | None, ...]:
    if dimension == "global":
        return (None,)
    if dimension == "knowledge":
        return KNOWLEDGE_DIMS
    if dimension == "cognitive":
        return COGNITIVE_DIMS
    raise ConfigError(f"unknown dimension {dimension!r} (one of {DIMENSIONS})")


def calibrate_table(
    corpus: Corpus,
    cache_key: str,
    flavors: Sequence[str] = FLAVORS,
    methods: Sequence[str] = METHODS,
    dimensions: Sequence[str] = DIMENSIONS,
    grid=DEFAULT_GRID,
    provenance: Provenance | None = None,
) -> ThresholdTable:
    """Optimal threshold per (flavor, method, category) cell of the scored corpus.

    Cells where only one source class is present cannot be calibrated; they
    are omitted and noted in the provenance warnings.
    """
    entries: list[ThresholdEntry] = []
    warnings: list[str] = []
    for flavor in flavors:
        flavored = apply_flavor(corpus, flavor)
        for method in methods:
            for dimension in dimensions:
                for category in _categories(dimension):
                    members = _category_members(flavored, dimension, category)
                    sources = {r.source for r in members}
                    if sources != {"human", "ai"}:
                        label = category if category is not None else "global"
                        message = (
                            f"omitted ({flavor}, {method}, {dimension}, {label}): "
                            f"{'no responses' if not members else 'single class ' + repr(sorted(sources)[0])}"
                        )
                        warnings.append(message)
                        log.warning(message)
                        continue
                    threshold, objective, _ = optimal_threshold(members, method, cache_key, grid)
                    entries.append(
                        ThresholdEntry(
                            flavor=flavor,
                            method=method,
                            dimension=dimension,
                            category=category,
                            threshold=threshold,
                            objective=objective,
                        )
                    )
    base = provenance if provenance is not None else Provenance()
    if isinstance(grid, tuple) and len(grid) == 3:
        grid_dict = {"lo": float(grid[0]), "hi": float(grid[1]), "step": float(grid[2])}
    else:
        grid_dict = {"points": [float(p) for p in grid]}
    final = Provenance(
        scorer=base.scorer,
        engine_config=base.engine_config,
        corpus_sha256=base.corpus_sha256,
        grid=grid_dict,
        warnings=tuple(warnings),
        created_at=base.created_at,
    )
    return ThresholdTable(entries=tuple(entries), provenance=final)
