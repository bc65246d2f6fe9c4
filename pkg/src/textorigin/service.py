"""Live classification service: perplexity in real time against stored thresholds.

State is two read-shared objects: the scorer handle and the current
threshold table. Reload swaps the table reference atomically, so in-flight
requests finish against the table they started with.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Literal

from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .calibration import ThresholdTable, classify
from .engine import EngineConfig, compute_perplexity
from .errors import (
    CoverageError,
    InputTooShortError,
    NumericError,
    TextOriginError,
    TransportError,
    ValidationError,
)
from .scoring.base import Scorer

MAX_TEXT_BYTES = 64 * 1024


class AnalyzeRequest(BaseModel):
    text: str
    flavor: Literal["orig", "min250", "no_math", "no_code", "no_math_no_code"] = "orig"
    method: Literal["auc", "f1"] = "auc"
    dimension: Literal["knowledge", "cognitive"] | None = None
    category: str | list[str] | None = None


class ReloadRequest(BaseModel):
    path: str


def resolve_threshold(table: ThresholdTable, request: AnalyzeRequest) -> tuple[float, dict]:
    """Pick the cutoff for a request; defaults to the global entry.

    A list of cognitive categories maps to the arithmetic mean of the member
    thresholds (multi-label questions have no single calibrated cutoff).
    """
    if request.category is not None and request.dimension is None:
        raise HTTPException(status_code=422, detail="category given without dimension")
    if request.dimension is not None and request.category is None:
        raise HTTPException(status_code=422, detail="dimension given without category")
    key = {"flavor": request.flavor, "method": request.method}
    if request.category is None:
        entry = table.lookup(request.flavor, request.method, "global", None)
        return entry.threshold, {**key, "dimension": "global", "category": None}
    categories = request.category if isinstance(request.category, list) else [request.category]
    if not categories:
        raise HTTPException(status_code=422, detail="category list is empty")
    if request.dimension == "knowledge" and len(categories) > 1:
        raise HTTPException(status_code=422, detail="knowledge dimension is single-valued")
    thresholds = [
        table.lookup(request.flavor, request.method, request.dimension, category).threshold
        for category in categories
    ]
    threshold = math.fsum(thresholds) / len(thresholds)
    return threshold, {**key, "dimension": request.dimension, "category": request.category}


def build_app(
    scorer: Scorer,
    engine_config: EngineConfig | None = None,
    thresholds_path: str | Path | None = None,
    table: ThresholdTable | None = None,
    static_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="textorigin", docs_url=None, redoc_url=None)
    if table is None and thresholds_path is not None:
        table = ThresholdTable.load(thresholds_path)
    app.state.scorer = scorer
    app.state.engine_config = engine_config if engine_config is not None else EngineConfig.for_scorer(scorer)
    app.state.table = table

    @app.get("/healthz")
    def healthz() -> dict:
        try:
            name = scorer.descriptor().name
        except TransportError as exc:
            raise HTTPException(status_code=503, detail=f"scorer backend unavailable: {exc}") from exc
        return {"status": "ok", "scorer": name}

    @app.get("/api/v1/thresholds")
    def get_thresholds() -> dict:
        current: ThresholdTable | None = app.state.table
        if current is None:
            raise HTTPException(status_code=503, detail="no threshold table loaded")
        return current.to_json_obj()

    @app.post("/api/v1/reload")
    def reload_thresholds(request: ReloadRequest) -> dict:
        try:
            new_table = ThresholdTable.load(request.path)
        except ValidationError as exc:
            raise HTTPException(status_code=400, detail=f"reload rejected, table unchanged: {exc}") from exc
        app.state.table = new_table  # atomic swap
        return {"ok": True}

    @app.post("/api/v1/analyze")
    def analyze(request: AnalyzeRequest) -> dict:
        current: ThresholdTable | None = app.state.table
        if current is None:
            raise HTTPException(status_code=503, detail="no threshold table loaded")
        if len(request.text.encode("utf-8")) > MAX_TEXT_BYTES:
            raise HTTPException(status_code=413, detail=f"text exceeds {MAX_TEXT_BYTES} bytes")
        try:
            threshold, threshold_key = resolve_threshold(current, request)
        except CoverageError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        try:
            report = compute_perplexity(request.text, app.state.scorer, app.state.engine_config)
        except InputTooShortError as exc:
            raise HTTPException(
                status_code=422,
                detail={
                    "error": "text_too_short",
                    "token_count": exc.token_count,
                    "min_tokens": exc.minimum,
                },
            ) from exc
        except TransportError as exc:
            raise HTTPException(status_code=503, detail=f"scorer backend unavailable: {exc}") from exc
        except (NumericError, TextOriginError) as exc:
            raise HTTPException(status_code=500, detail=str(exc)) from exc
        origin = classify(report.perplexity, threshold)
        return {
            "origin": origin,
            "perplexity": report.perplexity,
            "threshold": threshold,
            "threshold_key": threshold_key,
            "margin": report.perplexity - threshold,
            "scorer": report.scorer_name,
            "windows": [w.as_dict() for w in report.windows],
        }

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
