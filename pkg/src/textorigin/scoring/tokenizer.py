"""Deterministic word-level tokenizer for the built-in language model.

Rules: split on Unicode whitespace, then split punctuation characters
(Unicode category P*) off as single-character tokens. Case is preserved.
"""

from __future__ import annotations

import unicodedata

UNK_TOKEN = "[UNK]"
# "[" is punctuation, so the tokenizer can never emit UNK_TOKEN itself.


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def word_tokens(text: str) -> list[str]:
    """Split text into word and single-character punctuation tokens."""
    out: list[str] = []
    for chunk in text.split():
        run: list[str] = []
        for ch in chunk:
            if _is_punct(ch):
                if run:
                    out.append("".join(run))
                    run = []
                out.append(ch)
            else:
                run.append(ch)
        if run:
            out.append("".join(run))
    return out
