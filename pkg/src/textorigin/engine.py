"""Sliding-window perplexity: window scheduling, scoring, aggregation.

A text is evaluated in windows of at most m_len tokens advancing by stride
tokens. Consecutive windows overlap by m_len - stride tokens; the overlap
conditions the model but contributes no loss, so each token's loss is
counted exactly once. The final value is exp(mean of per-window mean NLLs).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

from .errors import ConfigError, InputTooShortError, NumericError
from .scoring.base import Scorer

MIN_TOKENS = 2


@dataclass(frozen=True)
class EngineConfig:
    """Windowing parameters.

    advance_by_m_len replays the literal pseudocode variant in which the
    window start jumps by m_len instead of stride (kept for A/B conformance;
    the worked trace this engine reproduces advances by stride).
    token_weighted switches aggregation to sum(nll * trg_len) / sum(trg_len);
    the default weighs every window equally regardless of target length.
    """

    m_len: int
    stride: int
    advance_by_m_len: bool = False
    token_weighted: bool = False

    def __post_init__(self) -> None:
        if not 1 <= self.stride <= self.m_len:
            raise ConfigError(f"need 1 <= stride <= m_len, got stride={self.stride}, m_len={self.m_len}")

    @classmethod
    def for_scorer(cls, scorer: Scorer) -> "EngineConfig":
        """Default: full context window, stride of half the window."""
        m_len = scorer.descriptor().max_window
        return cls(m_len=m_len, stride=max(1, m_len // 2))

    def as_dict(self) -> dict:
        return {"m_len": self.m_len, "stride": self.stride}


@dataclass(frozen=True)
class WindowScore:
    begin_loc: int
    end_loc: int
    trg_len: int
    nll: float

    def as_dict(self) -> dict:
        return {
            "begin_loc": self.begin_loc,
            "end_loc": self.end_loc,
            "trg_len": self.trg_len,
            "nll": self.nll,
        }


@dataclass(frozen=True)
class PerplexityReport:
    """Full evaluation trace: one row per window plus the aggregate."""

    perplexity: float
    token_count: int
    config: EngineConfig
    scorer_name: str
    windows: tuple[WindowScore, ...]

    def to_json_obj(self) -> dict:
        return {
            "perplexity": self.perplexity,
            "token_count": self.token_count,
            "config": self.config.as_dict(),
            "scorer": self.scorer_name,
            "windows": [w.as_dict() for w in self.windows],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True)

    @classmethod
    def from_json_obj(cls, obj: dict) -> "PerplexityReport":
        return cls(
            perplexity=float(obj["perplexity"]),
            token_count=int(obj["token_count"]),
            config=EngineConfig(m_len=int(obj["config"]["m_len"]), stride=int(obj["config"]["stride"])),
            scorer_name=str(obj["scorer"]),
            windows=tuple(
                WindowScore(int(w["begin_loc"]), int(w["end_loc"]), int(w["trg_len"]), float(w["nll"]))
                for w in obj["windows"]
            ),
        )


def schedule_windows(seq_len: int, config: EngineConfig) -> list[tuple[int, int, int]]:
    """Plan the (begin_loc, end_loc, trg_len) triples covering seq_len tokens.

    The first window starts at 0 and spans min(m_len, seq_len) tokens; each
    later window starts stride tokens after the previous one and its target
    length is whatever it adds beyond the previous window's end. Target
    ranges tile [0, seq_len) exactly.
    """
    if seq_len < 1:
        raise InputTooShortError(seq_len, 1)
    advance = config.m_len if config.advance_by_m_len else config.stride
    windows: list[tuple[int, int, int]] = []
    begin_loc = 0
    prev_end_loc = 0
    while True:
        end_loc = min(begin_loc + config.m_len, seq_len)
        windows.append((begin_loc, end_loc, end_loc - prev_end_loc))
        if end_loc == seq_len:
            return windows
        prev_end_loc = end_loc
        begin_loc += advance


def compute_perplexity(text: str, scorer: Scorer, config: EngineConfig | None = None) -> PerplexityReport:
    """Tokenize, score every scheduled window, and aggregate.

    Raises InputTooShortError below MIN_TOKENS tokens and NumericError if any
    window NLL (or the aggregate) is non-finite; a bad window is never
    silently skipped because that would bias the mean.
    """
    if config is None:
        config = EngineConfig.for_scorer(scorer)
    descriptor = scorer.descriptor()
    if config.m_len > descriptor.max_window:
        raise ConfigError(
            f"m_len {config.m_len} exceeds scorer {descriptor.name!r} max_window {descriptor.max_window}"
        )
    sequence = scorer.tokenize(text)
    token_count = len(sequence)
    if token_count < MIN_TOKENS:
        raise InputTooShortError(token_count, MIN_TOKENS)

    windows: list[WindowScore] = []
    for begin_loc, end_loc, trg_len in schedule_windows(token_count, config):
        nll = scorer.score_window(sequence.ids[begin_loc:end_loc], trg_len)
        if not math.isfinite(nll):
            raise NumericError(f"non-finite nll {nll!r} for window [{begin_loc}, {end_loc})")
        windows.append(WindowScore(begin_loc, end_loc, trg_len, nll))

    perplexity = aggregate_perplexity(windows, token_weighted=config.token_weighted)
    return PerplexityReport(
        perplexity=perplexity,
        token_count=token_count,
        config=config,
        scorer_name=descriptor.name,
        windows=tuple(windows),
    )


def aggregate_perplexity(windows: Sequence[WindowScore], token_weighted: bool = False) -> float:
    """exp of the (optionally token-weighted) mean window NLL."""
    if not windows:
        raise InputTooShortError(0, 1)
    if token_weighted:
        total_targets = sum(w.trg_len for w in windows)
        mean_nll = math.fsum(w.nll * w.trg_len for w in windows) / total_targets
    else:
        mean_nll = math.fsum(w.nll for w in windows) / len(windows)
    try:
        perplexity = math.exp(mean_nll)
    except OverflowError:
        raise NumericError(f"perplexity overflowed (mean nll {mean_nll})") from None
    if not math.isfinite(perplexity):
        raise NumericError(f"perplexity overflowed (mean nll {mean_nll})")
    return perplexity


def compare_candidates(
    context: str,
    candidates: Sequence[str],
    scorer: Scorer,
    config: EngineConfig | None = None,
) -> list[tuple[str, float]]:
    """Perplexity of context followed by each candidate, lowest first.

    Candidates are appended to the context with a single space so the
    built-in tokenizer sees them as separate words. Informational only; ties
    keep input order.
    """
    if not context.strip():
        raise InputTooShortError(0, 1)
    if not candidates:
        raise ConfigError("need at least one candidate")
    scored = [
        (candidate, compute_perplexity(f"{context} {candidate}", scorer, config).perplexity)
        for candidate in candidates
    ]
    return sorted(scored, key=lambda pair: pair[1])
