"""Offline run: score the corpus, split, calibrate thresholds, evaluate, persist.

Artifacts are staged under the output directory and promoted only when every
stage succeeded, so a failed run never leaves partial outputs behind. Reruns
with identical inputs and seed reproduce byte-identical artifacts; wall-clock
timestamps exist only in the run manifest. Freshly computed perplexities are
also written back into the corpus file itself so later runs start warm.
"""

from __future__ import annotations

import hashlib
import json
import os
import shutil
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .calibration import DEFAULT_GRID, DIMENSIONS, METHODS, Provenance, calibrate_table
from .corpus import FLAVORS, Corpus, corpus_digest, load_corpus, save_corpus, serialize_corpus, split
from .engine import EngineConfig, compute_perplexity
from .errors import ConfigError, PipelineError, TextOriginError
from .evaluation import emit_report, evaluate
from .scoring import NGramModel, NGramScorer, RemoteScorer, Scorer, uniform_scorer


def cache_key(scorer: Scorer, config: EngineConfig) -> str:
    """Identity of a (scorer, windowing, aggregation) combination.

    Any component change must change the key, because any of them changes
    the perplexity values.
    """
    descriptor = scorer.descriptor()
    payload = json.dumps(
        {
            "scorer": descriptor.as_dict(),
            "m_len": config.m_len,
            "stride": config.stride,
            "advance_by_m_len": config.advance_by_m_len,
            "token_weighted": config.token_weighted,
        },
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def build_scorer(spec: str) -> Scorer:
    """Parse a scorer selector: builtin:<model.json> | remote:<url> | uniform[:N]."""
    if spec.startswith("builtin:"):
        return NGramScorer(NGramModel.load(spec[len("builtin:"):]))
    if spec.startswith("remote:"):
        return RemoteScorer(spec[len("remote:"):])
    if spec == "uniform" or spec.startswith("uniform:"):
        _, _, size = spec.partition(":")
        return uniform_scorer(int(size) if size else 256)
    raise ConfigError(f"unknown scorer spec {spec!r} (use builtin:<path>, remote:<url> or uniform[:N])")


@dataclass(frozen=True)
class PipelineConfig:
    corpus_path: str
    scorer: str
    out_dir: str
    m_len: int | None = None
    stride: int | None = None
    advance_by_m_len: bool = False
    token_weighted: bool = False
    flavors: tuple[str, ...] = FLAVORS
    methods: tuple[str, ...] = METHODS
    dimensions: tuple[str, ...] = DIMENSIONS
    train_fraction: float = 0.9
    seed: int = 42
    grid: tuple[float, float, float] = DEFAULT_GRID
    rescore: bool = False

    def __post_init__(self) -> None:
        if not 0 < self.train_fraction < 1:
            raise ConfigError(f"train_fraction must be in (0, 1), got {self.train_fraction}")

    def engine_config(self, scorer: Scorer) -> EngineConfig:
        m_len = self.m_len if self.m_len is not None else scorer.descriptor().max_window
        stride = self.stride if self.stride is not None else max(1, m_len // 2)
        return EngineConfig(
            m_len=m_len,
            stride=stride,
            advance_by_m_len=self.advance_by_m_len,
            token_weighted=self.token_weighted,
        )

    def as_dict(self) -> dict:
        return {
            "corpus": self.corpus_path,
            "scorer": self.scorer,
            "out_dir": self.out_dir,
            "m_len": self.m_len,
            "stride": self.stride,
            "advance_by_m_len": self.advance_by_m_len,
            "token_weighted": self.token_weighted,
            "flavors": list(self.flavors),
            "methods": list(self.methods),
            "dimensions": list(self.dimensions),
            "train_fraction": self.train_fraction,
            "seed": self.seed,
            "grid": list(self.grid),
            "rescore": self.rescore,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "PipelineConfig":
        known = {
            "corpus": "corpus_path",
            "scorer": "scorer",
            "out_dir": "out_dir",
            "m_len": "m_len",
            "stride": "stride",
            "advance_by_m_len": "advance_by_m_len",
            "token_weighted": "token_weighted",
            "flavors": "flavors",
            "methods": "methods",
            "dimensions": "dimensions",
            "train_fraction": "train_fraction",
            "seed": "seed",
            "grid": "grid",
            "rescore": "rescore",
        }
        unknown = set(obj) - set(known)
        if unknown:
            raise ConfigError(f"unknown pipeline config keys: {sorted(unknown)}")
        kwargs = {known[k]: v for k, v in obj.items()}
        for key in ("flavors", "methods", "dimensions"):
            if key in kwargs:
                kwargs[key] = tuple(kwargs[key])
        if "grid" in kwargs:
            kwargs["grid"] = tuple(float(v) for v in kwargs["grid"])
        for key in ("corpus_path", "scorer", "out_dir"):
            if key not in kwargs:
                raise ConfigError(f"pipeline config missing required key {key!r}")
        return cls(**kwargs)


@dataclass(frozen=True)
class ScoreStats:
    cache_hits: int
    computed: int


@dataclass(frozen=True)
class StorageLayout:
    out_dir: Path
    scored_path: Path
    thresholds_path: Path
    eval_paths: dict[str, Path]
    manifest_path: Path
    manifest: dict


def score_corpus(
    corpus: Corpus,
    scorer: Scorer,
    config: EngineConfig,
    rescore: bool = False,
) -> tuple[Corpus, ScoreStats]:
    """Fill every response's perplexity cache under the active cache key.

    Failures are collected across the whole corpus and raised together; a
    partially scored corpus is never returned.
    """
    key = cache_key(scorer, config)
    hits = computed = 0
    failures: list[str] = []
    scored = []
    for response in corpus.responses:
        if not rescore and response.cached_ppl(key) is not None:
            hits += 1
            scored.append(response)
            continue
        try:
            report = compute_perplexity(response.text, scorer, config)
        except TextOriginError as exc:
            failures.append(f"{response.id}: {exc}")
            continue
        computed += 1
        scored.append(response.with_cached_ppl(key, report.perplexity))
    if failures:
        raise PipelineError("score", f"{len(failures)} response(s) failed: " + "; ".join(failures))
    return corpus.with_responses(scored), ScoreStats(cache_hits=hits, computed=computed)


def _sha256_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


class _OutputLock:
    """One pipeline run per output directory."""

    def __init__(self, out_dir: Path) -> None:
        self.path = out_dir / ".lock"

    def __enter__(self) -> "_OutputLock":
        try:
            fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise PipelineError(
                "lock", f"output directory is locked by another run (remove {self.path} if stale)"
            ) from None
        os.close(fd)
        return self

    def __exit__(self, *exc_info) -> None:
        self.path.unlink(missing_ok=True)


def _atomic_write_text(path: Path, content: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(content, encoding="utf-8")
    os.replace(tmp, path)


def run_offline(config: PipelineConfig) -> StorageLayout:
    """Execute score -> flavor -> split -> calibrate -> evaluate and persist.

    Flavored corpora are views computed inside calibration and evaluation;
    the persisted artifacts are the scored corpus, the threshold table, the
    evaluation reports and a manifest hashing all of them.
    """
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    started_at = datetime.now(timezone.utc).isoformat()

    with _OutputLock(out_dir):
        staging = out_dir / ".staging"
        if staging.exists():
            shutil.rmtree(staging)
        staging.mkdir()
        try:
            try:
                corpus = load_corpus(config.corpus_path)
            except TextOriginError as exc:
                raise PipelineError("load", str(exc)) from exc

            try:
                scorer = build_scorer(config.scorer)
                engine_config = config.engine_config(scorer)
                key = cache_key(scorer, engine_config)
                scored, stats = score_corpus(corpus, scorer, engine_config, rescore=config.rescore)
            except PipelineError:
                raise
            except TextOriginError as exc:
                raise PipelineError("score", str(exc)) from exc

            # warm the corpus file itself so the next run reuses the cache
            if stats.computed > 0:
                try:
                    _atomic_write_text(Path(config.corpus_path), serialize_corpus(scored))
                except OSError as exc:
                    raise PipelineError("score", f"cache write-back failed: {exc}") from exc

            try:
                train, test = split(scored, config.train_fraction, config.seed)
            except TextOriginError as exc:
                raise PipelineError("split", str(exc)) from exc

            try:
                provenance = Provenance(
                    scorer=scorer.descriptor().as_dict(),
                    engine_config={
                        "m_len": engine_config.m_len,
                        "stride": engine_config.stride,
                        "advance_by_m_len": engine_config.advance_by_m_len,
                        "token_weighted": engine_config.token_weighted,
                        "cache_key": key,
                        "split": {"train_fraction": config.train_fraction, "seed": config.seed},
                    },
                    corpus_sha256=corpus_digest(scored),
                )
                table = calibrate_table(
                    train,
                    key,
                    flavors=config.flavors,
                    methods=config.methods,
                    dimensions=config.dimensions,
                    grid=config.grid,
                    provenance=provenance,
                )
            except PipelineError:
                raise
            except TextOriginError as exc:
                raise PipelineError("calibrate", str(exc)) from exc

            try:
                report = evaluate(test, table, key)
            except TextOriginError as exc:
                raise PipelineError("evaluate", str(exc)) from exc

            try:
                save_corpus(scored, staging / "scored.jsonl")
                table.save(staging / "thresholds.json")
                eval_dir = staging / "eval"
                eval_dir.mkdir()
                (eval_dir / "report.json").write_text(emit_report(report, "json"), encoding="utf-8")
                (eval_dir / "report.csv").write_text(emit_report(report, "csv"), encoding="utf-8")

                artifact_names = ["scored.jsonl", "thresholds.json", "eval/report.json", "eval/report.csv"]
                manifest = {
                    "config": config.as_dict(),
                    "config_hash": hashlib.sha256(
                        json.dumps(config.as_dict(), sort_keys=True).encode("utf-8")
                    ).hexdigest()[:16],
                    "scorer": scorer.descriptor().as_dict(),
                    "cache_key": key,
                    "cache_hits": stats.cache_hits,
                    "rescored": stats.computed,
                    "threshold_entries": len(table.entries),
                    "started_at": started_at,
                    "finished_at": datetime.now(timezone.utc).isoformat(),
                    "artifacts": {
                        name: {"sha256": _sha256_file(staging / name)} for name in artifact_names
                    },
                }
                (staging / "manifest.json").write_text(
                    json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8"
                )

                # promote: atomic per-file renames out of staging
                (out_dir / "eval").mkdir(exist_ok=True)
                for name in artifact_names + ["manifest.json"]:
                    os.replace(staging / name, out_dir / name)
            except OSError as exc:
                raise PipelineError("persist", str(exc)) from exc
        finally:
            if staging.exists():
                shutil.rmtree(staging, ignore_errors=True)

    return StorageLayout(
        out_dir=out_dir,
        scored_path=out_dir / "scored.jsonl",
        thresholds_path=out_dir / "thresholds.json",
        eval_paths={
            "json": out_dir / "eval" / "report.json",
            "csv": out_dir / "eval" / "report.csv",
        },
        manifest_path=out_dir / "manifest.json",
        manifest=manifest,
    )
