"""Remote scorer wire protocol: HTTP client and a reference server.

Protocol (JSON over HTTP, field names fixed):
    POST /v1/tokenize      {"text": str}                  -> {"ids": [int], "tokens": [str]}
    POST /v1/score_window  {"ids": [int], "target_len": int}
                                                          -> {"mean_nll": float, "target_tokens": int}
    GET  /v1/descriptor                                   -> {"name": str, "vocab_size": int,
                                                              "max_window": int}

The client windows texts in the remote scorer's token space: tokenization
always happens server-side.
"""

from __future__ import annotations

from typing import Sequence

import httpx
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from ..errors import TextOriginError, TransportError
from .base import Scorer, ScorerDescriptor, TokenSequence, check_window_args


class RemoteScorer:
    """Client for a scorer served over the wire protocol.

    The descriptor is fetched lazily and cached; construction never touches
    the network, so a service can start before its backend is up.
    """

    def __init__(self, base_url: str, client: httpx.Client | None = None, timeout: float = 30.0) -> None:
        self.base_url = base_url.rstrip("/")
        self._client = client if client is not None else httpx.Client(timeout=timeout)
        self._descriptor: ScorerDescriptor | None = None

    def _request(self, method: str, path: str, payload: dict | None = None) -> dict:
        url = self.base_url + path
        try:
            response = self._client.request(method, url, json=payload)
        except httpx.HTTPError as exc:
            raise TransportError(f"{method} {url} failed: {exc}") from exc
        if response.status_code != 200:
            raise TransportError(f"{method} {url} returned {response.status_code}: {response.text[:200]}")
        try:
            body = response.json()
        except ValueError as exc:
            raise TransportError(f"{method} {url} returned non-JSON body") from exc
        if not isinstance(body, dict):
            raise TransportError(f"{method} {url} returned {type(body).__name__}, expected object")
        return body

    def descriptor(self) -> ScorerDescriptor:
        if self._descriptor is None:
            body = self._request("GET", "/v1/descriptor")
            try:
                self._descriptor = ScorerDescriptor(
                    name=str(body["name"]),
                    vocab_size=int(body["vocab_size"]),
                    max_window=int(body["max_window"]),
                )
            except KeyError as exc:
                raise TransportError(f"descriptor response missing field {exc}") from exc
        return self._descriptor

    def tokenize(self, text: str) -> TokenSequence:
        body = self._request("POST", "/v1/tokenize", {"text": text})
        try:
            return TokenSequence(
                ids=tuple(int(i) for i in body["ids"]),
                surface=tuple(str(t) for t in body["tokens"]),
            )
        except KeyError as exc:
            raise TransportError(f"tokenize response missing field {exc}") from exc

    def score_window(self, ids: Sequence[int], target_len: int) -> float:
        check_window_args(len(ids), target_len, self.descriptor().max_window)
        body = self._request("POST", "/v1/score_window", {"ids": list(ids), "target_len": target_len})
        try:
            return float(body["mean_nll"])
        except KeyError as exc:
            raise TransportError(f"score_window response missing field {exc}") from exc


class _TokenizeRequest(BaseModel):
    text: str


class _ScoreWindowRequest(BaseModel):
    ids: list[int]
    target_len: int


def build_scorer_app(scorer: Scorer):
    """Serve any in-process scorer over the wire protocol (reference server)."""
    app = FastAPI(title="scorer", docs_url=None, redoc_url=None)

    @app.get("/v1/descriptor")
    def descriptor() -> dict:
        return scorer.descriptor().as_dict()

    @app.post("/v1/tokenize")
    def tokenize(req: _TokenizeRequest) -> dict:
        seq = scorer.tokenize(req.text)
        tokens = list(seq.surface) if seq.surface is not None else [str(i) for i in seq.ids]
        return {"ids": list(seq.ids), "tokens": tokens}

    @app.post("/v1/score_window")
    def score_window(req: _ScoreWindowRequest) -> dict:
        try:
            mean_nll = scorer.score_window(req.ids, req.target_len)
        except TextOriginError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return {"mean_nll": mean_nll, "target_tokens": req.target_len}

    return app
