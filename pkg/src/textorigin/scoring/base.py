"""Scorer abstraction: tokenization plus per-window mean negative log-likelihood.

A scorer owns its tokenizer; callers window texts in the scorer's own token
space. All NLL values are natural-log (nats).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, Sequence, runtime_checkable

from ..errors import ConfigError


@dataclass(frozen=True)
class TokenSequence:
    """A text rendered in a scorer's model space.

    ids and surface (when present) are index-aligned; tokenizing the same
    text twice with the same scorer yields identical sequences.
    """

    ids: tuple[int, ...]
    surface: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if self.surface is not None and len(self.surface) != len(self.ids):
            raise ConfigError("ids and surface must have equal length")

    def __len__(self) -> int:
        return len(self.ids)


@dataclass(frozen=True)
class ScorerDescriptor:
    """Identity and limits of a scorer backend.

    max_window is the model context limit in tokens; windows longer than this
    must be rejected by score_window.
    """

    name: str
    vocab_size: int
    max_window: int

    def __post_init__(self) -> None:
        if self.vocab_size < 2:
            raise ConfigError(f"vocab_size must be >= 2, got {self.vocab_size}")
        if self.max_window < 2:
            raise ConfigError(f"max_window must be >= 2, got {self.max_window}")

    def as_dict(self) -> dict:
        return {"name": self.name, "vocab_size": self.vocab_size, "max_window": self.max_window}


@runtime_checkable
class Scorer(Protocol):
    """Interchangeable language-model backend.

    Implementations must be immutable after construction so concurrent
    readers are safe, and deterministic: identical inputs give bit-identical
    outputs.
    """

    def descriptor(self) -> ScorerDescriptor: ...

    def tokenize(self, text: str) -> TokenSequence: ...

    def score_window(self, ids: Sequence[int], target_len: int) -> float:
        """Mean NLL in nats over the last target_len positions of the window.

        The leading len(ids) - target_len tokens condition the targets but
        contribute no loss.
        """
        ...


def check_window_args(length: int, target_len: int, max_window: int) -> None:
    """Shared precondition checks for score_window implementations."""
    from ..errors import ContractError, WindowSizeError

    if length > max_window:
        raise WindowSizeError(f"window of {length} tokens exceeds max_window {max_window}")
    if not 1 <= target_len <= length:
        raise ContractError(f"target_len {target_len} out of range [1, {length}]")
