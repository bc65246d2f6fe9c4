"""Perplexity-based detection of AI-generated homework text.

Pipeline in one sentence: a language-model scorer assigns each text a
sliding-window perplexity, calibrated thresholds (global or per taxonomy
category) turn that number into a human/ai verdict, and an HTTP service plus
CLI expose both steps.
"""

__version__ = "0.1.0"

from .calibration import (
    ConfusionCounts,
    RocPoint,
    ThresholdEntry,
    ThresholdTable,
    auc_single_point,
    calibrate_table,
    classify,
    confusion,
    f1_score,
    optimal_threshold,
)
from .corpus import Corpus, LabeledResponse, QuestionMeta, apply_flavor, load_corpus, save_corpus, split
from .engine import (
    EngineConfig,
    PerplexityReport,
    WindowScore,
    compare_candidates,
    compute_perplexity,
    schedule_windows,
)
from .evaluation import AccuracyReport, emit_report, evaluate
from .pipeline import PipelineConfig, build_scorer, cache_key, run_offline, score_corpus
from .scoring import NGramModel, NGramScorer, RemoteScorer, ReplayScorer, train_ngram, uniform_scorer

__all__ = [
    "__version__",
    "ConfusionCounts",
    "RocPoint",
    "ThresholdEntry",
    "ThresholdTable",
    "auc_single_point",
    "calibrate_table",
    "classify",
    "confusion",
    "f1_score",
    "optimal_threshold",
    "Corpus",
    "LabeledResponse",
    "QuestionMeta",
    "apply_flavor",
    "load_corpus",
    "save_corpus",
    "split",
    "EngineConfig",
    "PerplexityReport",
    "WindowScore",
    "compare_candidates",
    "compute_perplexity",
    "schedule_windows",
    "AccuracyReport",
    "emit_report",
    "evaluate",
    "PipelineConfig",
    "build_scorer",
    "cache_key",
    "run_offline",
    "score_corpus",
    "NGramModel",
    "NGramScorer",
    "RemoteScorer",
    "ReplayScorer",
    "train_ngram",
    "uniform_scorer",
]
