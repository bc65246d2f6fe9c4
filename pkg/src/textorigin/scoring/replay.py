"""Scripted scorer for tests and demos: replays a fixed NLL trace."""

from __future__ import annotations

import hashlib
from typing import Sequence

from ..errors import ContractError
from .base import ScorerDescriptor, TokenSequence, check_window_args


def _stable_id(word: str, vocab_size: int) -> int:
    digest = hashlib.sha256(word.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") % vocab_size


class ReplayScorer:
    """Returns scripted per-window NLLs in call order.

    Give either a constant NLL or an explicit trace; a trace is consumed one
    window per score_window call (reset() rewinds it). Unlike real scorers
    this object is stateful and not safe for concurrent use.
    """

    def __init__(
        self,
        nlls: Sequence[float] | None = None,
        constant: float | None = None,
        name: str = "replay",
        vocab_size: int = 50257,
        max_window: int = 1024,
    ) -> None:
        if (nlls is None) == (constant is None):
            raise ContractError("give exactly one of nlls or constant")
        self._trace = list(nlls) if nlls is not None else None
        self._constant = constant
        self._pos = 0
        self._name = name
        self._vocab_size = vocab_size
        self._max_window = max_window

    def reset(self) -> None:
        self._pos = 0

    def descriptor(self) -> ScorerDescriptor:
        return ScorerDescriptor(self._name, self._vocab_size, self._max_window)

    def tokenize(self, text: str) -> TokenSequence:
        words = text.split()
        return TokenSequence(
            ids=tuple(_stable_id(w, self._vocab_size) for w in words),
            surface=tuple(words),
        )

    def score_window(self, ids: Sequence[int], target_len: int) -> float:
        check_window_args(len(ids), target_len, self._max_window)
        if self._constant is not None:
            return self._constant
        assert self._trace is not None
        if self._pos >= len(self._trace):
            raise ContractError(f"replay trace exhausted after {len(self._trace)} windows")
        value = self._trace[self._pos]
        self._pos += 1
        return value
