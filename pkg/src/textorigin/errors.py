"""Exception types shared across the toolkit.

Every error raised on purpose derives from TextOriginError so callers (CLI,
HTTP service) can map failure classes to exit codes / status codes without
string matching.
"""

from __future__ import annotations


class TextOriginError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(TextOriginError):
    """Invalid configuration value (bad order, smoothing constant, stride...)."""


class ContractError(TextOriginError):
    """A call violated an operation precondition (e.g. target_len out of range)."""


class WindowSizeError(TextOriginError):
    """A window exceeds the scorer's maximum context length."""


class InputTooShortError(TextOriginError):
    """Input has fewer tokens than the operation requires."""

    def __init__(self, token_count: int, minimum: int) -> None:
        super().__init__(f"input has {token_count} token(s), need at least {minimum}")
        self.token_count = token_count
        self.minimum = minimum


class NumericError(TextOriginError):
    """A computation produced or received a non-finite value."""


class TransportError(TextOriginError):
    """Remote scorer request failed (connection, timeout, bad status, bad body)."""


class ValidationError(TextOriginError):
    """A corpus or artifact file violates its schema.

    Carries enough position information to point at the offending line.
    """

    def __init__(self, reason: str, *, line: int | None = None, field: str | None = None) -> None:
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + reason)
        self.line = line
        self.field = field
        self.reason = reason


class StratificationError(TextOriginError):
    """A stratified split cannot place both classes in both halves."""


class StaleCacheError(TextOriginError):
    """A response lacks a cached perplexity for the active scorer/config key."""

    def __init__(self, response_id: str, cache_key: str) -> None:
        super().__init__(f"response {response_id!r} has no cached perplexity for key {cache_key!r}")
        self.response_id = response_id
        self.cache_key = cache_key


class UndefinedMetricError(TextOriginError):
    """A statistic is undefined for the given confusion counts (a class is absent)."""


class CoverageError(TextOriginError):
    """The threshold table does not cover a requested (flavor, method, category) cell."""


class PipelineError(TextOriginError):
    """A pipeline stage failed; message carries the stage tag."""

    def __init__(self, stage: str, message: str) -> None:
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
