"""Language-model scorer backends: built-in n-gram, remote wire client, test doubles."""

from .base import Scorer, ScorerDescriptor, TokenSequence
from .ngram import NGramModel, NGramScorer, train_ngram, uniform_scorer
from .remote import RemoteScorer, build_scorer_app
from .replay import ReplayScorer
from .tokenizer import UNK_TOKEN, word_tokens

__all__ = [
    "Scorer",
    "ScorerDescriptor",
    "TokenSequence",
    "NGramModel",
    "NGramScorer",
    "train_ngram",
    "uniform_scorer",
    "RemoteScorer",
    "build_scorer_app",
    "ReplayScorer",
    "UNK_TOKEN",
    "word_tokens",
]
