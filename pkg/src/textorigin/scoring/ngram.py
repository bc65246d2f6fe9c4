"""Word-level add-k n-gram language model and its scorer adapter.

The model is the hermetic stand-in for a neural LM: deterministic, strictly
positive probabilities, hand-checkable counts. Count tables are kept for
every context length from 0 to order-1 so positions near a window start can
be conditioned on whatever shorter context is available.

Conditional probability rule: the query context is truncated to the last
order-1 tokens, unknown tokens are mapped to the reserved UNK token, and the
longest stored suffix of the context is used for the add-k estimate:

    p(w | ctx) = (count(ctx', w) + k) / (total(ctx') + k * |V|)

where ctx' is that suffix and |V| includes UNK. A model trained on an empty
corpus has no counts at all; its conditionals are uniform over a synthetic
vocabulary size (default 256) so perplexity stays well-defined.
"""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

from ..errors import ConfigError, ContractError, ValidationError
from .base import ScorerDescriptor, TokenSequence, check_window_args
from .tokenizer import UNK_TOKEN, word_tokens

MODEL_FILE_VERSION = 1
DEFAULT_UNIFORM_VOCAB_SIZE = 256


class NGramModel:
    """Frequency tables plus smoothing constant; immutable after training."""

    def __init__(
        self,
        order: int,
        smoothing_k: float,
        counts: dict[tuple[str, ...], dict[str, int]],
        vocab: Iterable[str],
        uniform_vocab_size: int = DEFAULT_UNIFORM_VOCAB_SIZE,
    ) -> None:
        if order < 1:
            raise ConfigError(f"order must be >= 1, got {order}")
        if not smoothing_k > 0:
            raise ConfigError(f"smoothing_k must be > 0, got {smoothing_k}")
        if uniform_vocab_size < 2:
            raise ConfigError(f"uniform_vocab_size must be >= 2, got {uniform_vocab_size}")
        self.order = order
        self.smoothing_k = float(smoothing_k)
        self.counts = counts
        self.vocab: tuple[str, ...] = tuple(sorted(set(vocab) | {UNK_TOKEN}))
        self.uniform_vocab_size = uniform_vocab_size
        self._vocab_set = frozenset(self.vocab)
        self._totals = {ctx: sum(table.values()) for ctx, table in counts.items()}

    @property
    def vocab_size(self) -> int:
        """Effective vocabulary size used for smoothing denominators."""
        if not self.counts:
            return self.uniform_vocab_size
        return len(self.vocab)

    def _fold_unk(self, token: str) -> str:
        return token if token in self._vocab_set else UNK_TOKEN

    def prob(self, context: Sequence[str], token: str) -> float:
        """Smoothed conditional probability of token given context."""
        if not self.counts:
            return 1.0 / self.uniform_vocab_size
        ctx = tuple(self._fold_unk(t) for t in context[max(0, len(context) - (self.order - 1)):]) \
            if self.order > 1 else ()
        while ctx and ctx not in self.counts:
            ctx = ctx[1:]
        table = self.counts.get(ctx, {})
        total = self._totals.get(ctx, 0)
        c = table.get(self._fold_unk(token), 0)
        v = len(self.vocab)
        return (c + self.smoothing_k) / (total + self.smoothing_k * v)

    def log_prob(self, context: Sequence[str], token: str) -> float:
        return math.log(self.prob(context, token))

    # -- serialization -----------------------------------------------------

    def to_json_obj(self) -> dict:
        return {
            "version": MODEL_FILE_VERSION,
            "order": self.order,
            "smoothing_k": self.smoothing_k,
            "uniform_vocab_size": self.uniform_vocab_size,
            "vocab": list(self.vocab),
            "counts": {
                " ".join(ctx): dict(sorted(table.items())) for ctx, table in self.counts.items()
            },
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True, ensure_ascii=False)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps() + "\n", encoding="utf-8")

    @classmethod
    def from_json_obj(cls, obj: dict) -> "NGramModel":
        if obj.get("version") != MODEL_FILE_VERSION:
            raise ValidationError(f"unsupported model file version {obj.get('version')!r}")
        try:
            counts = {
                tuple(key.split(" ")) if key else (): {t: int(n) for t, n in table.items()}
                for key, table in obj["counts"].items()
            }
            return cls(
                order=int(obj["order"]),
                smoothing_k=float(obj["smoothing_k"]),
                counts=counts,
                vocab=obj["vocab"],
                uniform_vocab_size=int(obj.get("uniform_vocab_size", DEFAULT_UNIFORM_VOCAB_SIZE)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed model file: {exc}") from exc

    @classmethod
    def load(cls, path: str | Path) -> "NGramModel":
        try:
            obj = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ValidationError(f"model file is not valid JSON: {exc}") from exc
        return cls.from_json_obj(obj)

    def fingerprint(self) -> str:
        """Content digest; two models score identically iff their fingerprints match."""
        return hashlib.sha256(self.dumps().encode("utf-8")).hexdigest()[:8]


def train_ngram(
    corpus: Iterable[str],
    order: int = 3,
    smoothing_k: float = 1.0,
    uniform_vocab_size: int = DEFAULT_UNIFORM_VOCAB_SIZE,
) -> NGramModel:
    """Count every context of length 0..order-1 across the tokenized corpus.

    Documents are independent: contexts never span document boundaries.
    """
    if order < 1:
        raise ConfigError(f"order must be >= 1, got {order}")
    if not smoothing_k > 0:
        raise ConfigError(f"smoothing_k must be > 0, got {smoothing_k}")
    counts: dict[tuple[str, ...], dict[str, int]] = {}
    vocab: set[str] = set()
    for text in corpus:
        tokens = word_tokens(text)
        vocab.update(tokens)
        for i, token in enumerate(tokens):
            for clen in range(min(i, order - 1) + 1):
                ctx = tuple(tokens[i - clen:i])
                table = counts.setdefault(ctx, {})
                table[token] = table.get(token, 0) + 1
    return NGramModel(order, smoothing_k, counts, vocab, uniform_vocab_size)


class NGramScorer:
    """Scorer backend over an NGramModel.

    Token ids are indices into the model's sorted vocabulary; unknown words
    fold to the UNK id at tokenize time, mirroring how a fixed-vocabulary
    neural tokenizer maps text into model space.
    """

    def __init__(self, model: NGramModel, max_window: int = 1024) -> None:
        if max_window < 2:
            raise ConfigError(f"max_window must be >= 2, got {max_window}")
        self.model = model
        self.max_window = max_window
        self._id_of = {token: i for i, token in enumerate(model.vocab)}
        self._unk_id = self._id_of[UNK_TOKEN]
        self._name = f"ngram-o{model.order}-{model.fingerprint()}"

    def descriptor(self) -> ScorerDescriptor:
        return ScorerDescriptor(
            name=self._name,
            vocab_size=self.model.vocab_size,
            max_window=self.max_window,
        )

    def tokenize(self, text: str) -> TokenSequence:
        words = word_tokens(text)
        ids = tuple(self._id_of.get(w, self._unk_id) for w in words)
        return TokenSequence(ids=ids, surface=tuple(words))

    def score_window(self, ids: Sequence[int], target_len: int) -> float:
        check_window_args(len(ids), target_len, self.max_window)
        try:
            tokens = [self.model.vocab[i] for i in ids]
        except IndexError:
            raise ContractError("token id outside this scorer's vocabulary") from None
        start = len(tokens) - target_len
        log_probs = [
            self.model.log_prob(tokens[max(0, i - (self.model.order - 1)):i], tokens[i])
            for i in range(start, len(tokens))
        ]
        return -math.fsum(log_probs) / target_len


def uniform_scorer(vocab_size: int = DEFAULT_UNIFORM_VOCAB_SIZE, max_window: int = 1024) -> NGramScorer:
    """Empty-corpus model: every conditional is 1/vocab_size."""
    return NGramScorer(train_ngram([], uniform_vocab_size=vocab_size), max_window=max_window)
