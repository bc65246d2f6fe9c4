"""Command-line entry point.

Exit codes: 0 success, 2 user/input error, 3 backend/transport error,
4 internal invariant breach.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import __version__
from .calibration import ThresholdTable
from .corpus import load_corpus
from .engine import EngineConfig, compare_candidates, compute_perplexity
from .errors import (
    ConfigError,
    ContractError,
    CoverageError,
    InputTooShortError,
    PipelineError,
    StaleCacheError,
    StratificationError,
    TextOriginError,
    TransportError,
    UndefinedMetricError,
    ValidationError,
)
from .evaluation import FORMATS, emit_report, evaluate
from .pipeline import PipelineConfig, build_scorer, run_offline
from .scoring import train_ngram

ENV_PREFIX = "TEXTORIGIN"

_USER_ERRORS = (
    ValidationError,
    ConfigError,
    InputTooShortError,
    ContractError,
    StratificationError,
    UndefinedMetricError,
    CoverageError,
    StaleCacheError,
)


def _exit_code(exc: TextOriginError) -> int:
    if isinstance(exc, TransportError):
        return 3
    if isinstance(exc, PipelineError):
        return 3 if isinstance(exc.__cause__, TransportError) else 2
    if isinstance(exc, _USER_ERRORS):
        return 2
    return 4


def _fail(exc: TextOriginError) -> None:
    click.echo(f"error: {exc}", err=True)
    sys.exit(_exit_code(exc))


def _engine_config(scorer, m_len: int | None, stride: int | None) -> EngineConfig:
    if m_len is None:
        m_len = scorer.descriptor().max_window
    if stride is None:
        stride = max(1, m_len // 2)
    return EngineConfig(m_len=m_len, stride=stride)


@click.group()
@click.version_option(__version__)
def main() -> None:
    """Perplexity-based detector of AI-generated homework text."""


@main.command()
@click.option("--file", "file_path", type=click.Path(), help="Text file to score.")
@click.option("--stdin", "use_stdin", is_flag=True, help="Read the text from stdin.")
@click.option("--scorer", "scorer_spec", required=True, envvar=f"{ENV_PREFIX}_SCORER",
              help="builtin:<model.json> | remote:<url> | uniform[:N]")
@click.option("--m-len", type=int, default=None, envvar=f"{ENV_PREFIX}_M_LEN")
@click.option("--stride", type=int, default=None, envvar=f"{ENV_PREFIX}_STRIDE")
@click.option("--windows", "show_windows", is_flag=True, help="Print the per-window table.")
@click.option("--json", "as_json", is_flag=True, help="Emit the full report as JSON.")
def score(file_path, use_stdin, scorer_spec, m_len, stride, show_windows, as_json) -> None:
    """Compute sliding-window perplexity for one text."""
    if bool(file_path) == bool(use_stdin):
        click.echo("error: give exactly one of --file or --stdin", err=True)
        sys.exit(2)
    if file_path:
        path = Path(file_path)
        if not path.exists():
            click.echo(f"error: no such file: {path}", err=True)
            sys.exit(2)
        text = path.read_text(encoding="utf-8")
    else:
        text = sys.stdin.read()
    try:
        scorer = build_scorer(scorer_spec)
        report = compute_perplexity(text, scorer, _engine_config(scorer, m_len, stride))
    except TextOriginError as exc:
        _fail(exc)
    if as_json:
        click.echo(report.to_json())
        return
    click.echo(f"perplexity: {report.perplexity:.4f}  tokens: {report.token_count}  scorer: {report.scorer_name}")
    if show_windows:
        click.echo(f"{'begin_loc':>9}  {'end_loc':>7}  {'trg_len':>7}  {'nll':>10}")
        for w in report.windows:
            click.echo(f"{w.begin_loc:>9}  {w.end_loc:>7}  {w.trg_len:>7}  {w.nll:>10.4f}")


@main.command("train-lm")
@click.option("--input", "input_path", type=click.Path(), required=True,
              help="UTF-8 text file, one document per line.")
@click.option("--order", type=int, default=3, show_default=True)
@click.option("--smoothing-k", type=float, default=1.0, show_default=True)
@click.option("--out", "out_path", type=click.Path(), required=True)
def train_lm(input_path, order, smoothing_k, out_path) -> None:
    """Train the built-in n-gram model and write it as JSON."""
    path = Path(input_path)
    if not path.exists():
        click.echo(f"error: no such file: {path}", err=True)
        sys.exit(2)
    docs = [line for line in path.read_text(encoding="utf-8").splitlines() if line.strip()]
    try:
        model = train_ngram(docs, order=order, smoothing_k=smoothing_k)
        model.save(out_path)
    except TextOriginError as exc:
        _fail(exc)
    click.echo(f"trained order-{order} model on {len(docs)} document(s): "
               f"vocab {len(model.vocab)}, contexts {len(model.counts)} -> {out_path}")


def _pipeline_config(config_path, overrides: dict) -> PipelineConfig:
    # precedence: flags > env (click envvar) > config file
    base: dict = {}
    if config_path:
        path = Path(config_path)
        if not path.exists():
            click.echo(f"error: no such file: {path}", err=True)
            sys.exit(2)
        try:
            base = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            click.echo(f"error: config file is not valid JSON: {exc}", err=True)
            sys.exit(2)
    base.update({k: v for k, v in overrides.items() if v is not None})
    return PipelineConfig.from_dict(base)


@main.command()
@click.option("--config", "config_path", type=click.Path(), help="Pipeline config JSON.")
@click.option("--corpus", envvar=f"{ENV_PREFIX}_CORPUS", default=None)
@click.option("--scorer", envvar=f"{ENV_PREFIX}_SCORER", default=None)
@click.option("--out", "out_dir", envvar=f"{ENV_PREFIX}_OUT", default=None)
@click.option("--m-len", type=int, default=None, envvar=f"{ENV_PREFIX}_M_LEN")
@click.option("--stride", type=int, default=None, envvar=f"{ENV_PREFIX}_STRIDE")
@click.option("--train-fraction", type=float, default=None)
@click.option("--seed", type=int, default=None, envvar=f"{ENV_PREFIX}_SEED")
@click.option("--rescore", is_flag=True, default=None, help="Ignore cached perplexities.")
@click.option("--json", "as_json", is_flag=True, help="Emit the run summary as JSON.")
def calibrate(config_path, corpus, scorer, out_dir, m_len, stride, train_fraction, seed, rescore, as_json) -> None:
    """Run the offline pipeline: score, split, calibrate, evaluate, persist."""
    overrides = {
        "corpus": corpus,
        "scorer": scorer,
        "out_dir": out_dir,
        "m_len": m_len,
        "stride": stride,
        "train_fraction": train_fraction,
        "seed": seed,
        "rescore": rescore,
    }
    try:
        config = _pipeline_config(config_path, overrides)
        layout = run_offline(config)
    except TextOriginError as exc:
        _fail(exc)
    manifest = layout.manifest
    table = ThresholdTable.load(layout.thresholds_path)
    summary = {
        "out_dir": str(layout.out_dir),
        "threshold_entries": len(table.entries),
        "cache_hits": manifest["cache_hits"],
        "rescored": manifest["rescored"],
        "global_thresholds": {},
        "warnings": len(table.provenance.warnings),
    }
    for method in config.methods:
        try:
            summary["global_thresholds"][method] = table.lookup("orig", method, "global", None).threshold
        except CoverageError:
            pass
    if as_json:
        click.echo(json.dumps(summary, sort_keys=True))
        return
    click.echo(f"artifacts written to {layout.out_dir}")
    click.echo(f"threshold entries: {summary['threshold_entries']} (warnings: {summary['warnings']})")
    for method, value in summary["global_thresholds"].items():
        click.echo(f"global threshold ({method}, orig): {value}")
    click.echo(f"cache hits: {manifest['cache_hits']}, rescored: {manifest['rescored']}")


@main.command("evaluate")
@click.option("--scored", "scored_path", type=click.Path(), required=True,
              help="Scored corpus JSONL (used as the test set).")
@click.option("--thresholds", "thresholds_path", type=click.Path(), required=True)
@click.option("--format", "fmt", type=click.Choice(FORMATS), default="markdown-table", show_default=True)
@click.option("--out", "out_path", type=click.Path(), default=None, help="Write instead of printing.")
def evaluate_cmd(scored_path, thresholds_path, fmt, out_path) -> None:
    """Evaluate a scored corpus against a stored threshold table."""
    try:
        corpus = load_corpus(scored_path)
        table = ThresholdTable.load(thresholds_path)
        key = table.provenance.engine_config.get("cache_key")
        if not key:
            raise ValidationError("threshold table provenance lacks a cache_key; cannot match scores")
        report = evaluate(corpus, table, key)
        document = emit_report(report, fmt)
    except TextOriginError as exc:
        _fail(exc)
    if out_path:
        Path(out_path).write_text(document, encoding="utf-8")
        click.echo(f"report written to {out_path}")
    else:
        click.echo(document, nl=False)


@main.command()
@click.option("--file", "table_path", type=click.Path(), required=True)
@click.option("--json", "as_json", is_flag=True)
def thresholds(table_path, as_json) -> None:
    """Inspect a threshold table file."""
    try:
        table = ThresholdTable.load(table_path)
    except TextOriginError as exc:
        _fail(exc)
    if as_json:
        click.echo(table.to_json(), nl=False)
        return
    provenance = table.provenance
    click.echo(f"entries: {len(table.entries)}  scorer: {provenance.scorer.get('name', '?')}  "
               f"corpus: {provenance.corpus_sha256[:12] or '?'}")
    click.echo(f"{'flavor':<16} {'method':<6} {'dimension':<10} {'category':<14} {'threshold':>9} {'objective':>9}")
    for entry in table.entries:
        click.echo(f"{entry.flavor:<16} {entry.method:<6} {entry.dimension:<10} "
                   f"{entry.category or '-':<14} {entry.threshold:>9.2f} {entry.objective:>9.4f}")
    for warning in provenance.warnings:
        click.echo(f"warning: {warning}")


@main.command()
@click.option("--context", required=True)
@click.option("--scorer", "scorer_spec", required=True, envvar=f"{ENV_PREFIX}_SCORER")
@click.option("--m-len", type=int, default=None, envvar=f"{ENV_PREFIX}_M_LEN")
@click.option("--stride", type=int, default=None, envvar=f"{ENV_PREFIX}_STRIDE")
@click.option("--json", "as_json", is_flag=True)
@click.argument("candidates", nargs=-1, required=True)
def compare(context, scorer_spec, m_len, stride, as_json, candidates) -> None:
    """Rank candidate continuations of a context by perplexity (lowest first)."""
    try:
        scorer = build_scorer(scorer_spec)
        ranked = compare_candidates(context, list(candidates), scorer, _engine_config(scorer, m_len, stride))
    except TextOriginError as exc:
        _fail(exc)
    if as_json:
        click.echo(json.dumps([{"candidate": c, "perplexity": p} for c, p in ranked]))
        return
    for candidate, ppl in ranked:
        click.echo(f"{ppl:>10.4f}  {candidate}")


@main.command()
@click.option("--port", type=int, default=8100, show_default=True, envvar=f"{ENV_PREFIX}_PORT")
@click.option("--host", default="127.0.0.1", show_default=True, envvar=f"{ENV_PREFIX}_HOST")
@click.option("--thresholds", "thresholds_path", type=click.Path(), required=True,
              envvar=f"{ENV_PREFIX}_THRESHOLDS")
@click.option("--scorer", "scorer_spec", required=True, envvar=f"{ENV_PREFIX}_SCORER")
@click.option("--m-len", type=int, default=None, envvar=f"{ENV_PREFIX}_M_LEN")
@click.option("--stride", type=int, default=None, envvar=f"{ENV_PREFIX}_STRIDE")
@click.option("--ui", "ui_dir", type=click.Path(), default=None, envvar=f"{ENV_PREFIX}_UI",
              help="Static frontend directory to serve at /.")
def serve(port, host, thresholds_path, scorer_spec, m_len, stride, ui_dir) -> None:
    """Start the classification service."""
    import uvicorn

    from .service import build_app

    try:
        scorer = build_scorer(scorer_spec)
        app = build_app(
            scorer,
            engine_config=_engine_config(scorer, m_len, stride),
            thresholds_path=thresholds_path,
            static_dir=ui_dir,
        )
    except TextOriginError as exc:
        _fail(exc)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
