"""``profiler`` command line: score, evaluate, label and sweep email corpora.

Exit status is 0 on success, 1 on usage or configuration errors and 2 when
one or more messages could not be ingested (the run still completes and the
errors are written to a sidecar JSON-lines file).
"""
from __future__ import annotations

import contextlib
import json
import os
import sys
import time
from pathlib import Path
from typing import Iterator

import click

from . import __version__
from .config import DEFAULT_CONFIG_TEXT, ENV_VAR, ConfigError, ThresholdConfig, load_config
from .evaluation import (
    EvaluationError,
    LabelledScore,
    build_histogram,
    evaluate,
    label_assessments,
    sweep_csv,
    threshold_sweep,
)
from .ingest import FORMATS, EmailDocument, IngestError, iter_documents
from .orchestrator import LEGITIMATE, PHISHING, assess_stream, default_jobs

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2

_EXTENSIONS = {".mbox": "mbox", ".mbx": "mbox", ".eml": "eml", ".txt": "eml", ".jsonl": "jsonl", ".ndjson": "jsonl"}
_TRUTH_ALIASES = {
    "legit": LEGITIMATE,
    "legitimate": LEGITIMATE,
    "ham": LEGITIMATE,
    "phish": PHISHING,
    "phishing": PHISHING,
}


class Progress:
    """Machine-readable progress events on stderr, one JSON object per line."""

    def __init__(self, total=None, every=1000, enabled=True, stream=None):
        self.total = total
        self.every = every
        self.enabled = enabled
        self.stream = stream or sys.stderr
        self.processed = 0
        self.errors = 0
        self.start = time.perf_counter()
        self._emit("start")

    def _emit(self, event, **extra):
        if not self.enabled:
            return
        rec = {"event": event, "processed": self.processed, "total": self.total, "errors": self.errors}
        rec.update(extra)
        self.stream.write(json.dumps(rec) + "\n")
        self.stream.flush()

    def scored(self, n=1):
        self.processed += n
        if self.every and self.processed % self.every == 0:
            self._emit("progress")

    def error(self, n=1):
        self.errors += n

    def finish(self, error_file=None):
        elapsed = time.perf_counter() - self.start
        rate = self.processed / elapsed if elapsed > 0 else None
        extra = {"elapsed_s": round(elapsed, 3), "emails_per_sec": None if rate is None else round(rate, 1)}
        if error_file is not None:
            extra["error_file"] = str(error_file)
        self._emit("done", **extra)


class Run:
    """Shared state for one invocation: config, inputs, ingest errors."""

    def __init__(self, config, jobs, quiet):
        self.config = config
        self.jobs = jobs
        self.quiet = quiet
        self.errors: list[IngestError] = []
        self.progress = None

    def documents(self, paths, fmt) -> Iterator[tuple[EmailDocument, Path]]:
        for path in paths:
            file_fmt = fmt or infer_format(path)
            with open(path, "rb") as fh:
                for rec in iter_documents(fh, file_fmt, str(path)):
                    if isinstance(rec, IngestError):
                        self.errors.append(rec)
                        if self.progress:
                            self.progress.error()
                    else:
                        yield rec, path

    def assessed(self, inputs, fmt, keep=None):
        """Score every document; ``keep`` receives each (doc, path) in order."""
        paths = expand_inputs(inputs)
        for path in paths:
            if fmt is None:
                infer_format(path)
        return self._assessed(paths, fmt, keep)

    def _assessed(self, paths, fmt, keep):
        self.progress = Progress(enabled=not self.quiet)

        def docs():
            for doc, path in self.documents(paths, fmt):
                if keep is not None:
                    keep(doc, path)
                yield doc

        for a in assess_stream(docs(), self.config, self.jobs):
            self.progress.scored()
            yield a

    def finish(self, output) -> int:
        error_file = None
        if self.errors:
            error_file = sidecar_path(output)
            with open(error_file, "w", encoding="utf-8") as fh:
                for err in self.errors:
                    fh.write(json.dumps(err.to_dict()) + "\n")
        if self.progress:
            self.progress.finish(error_file)
        return EXIT_DATA if self.errors else EXIT_OK


def sidecar_path(output) -> Path:
    if output in (None, "-"):
        return Path("profiler-errors.jsonl")
    return Path(str(output) + ".errors.jsonl")


def infer_format(path: Path) -> str:
    fmt = _EXTENSIONS.get(path.suffix.lower())
    if fmt is None:
        raise click.UsageError(f"cannot infer the format of {path}; pass --format")
    return fmt


def expand_inputs(paths) -> list[Path]:
    out = []
    for p in map(Path, paths):
        if p.is_dir():
            out.extend(sorted(f for f in p.rglob("*") if f.is_file() and not f.name.startswith(".")))
        elif p.exists():
            out.append(p)
        else:
            raise click.UsageError(f"input not found: {p}")
    return out


def truth_for(doc: EmailDocument, path: Path) -> str | None:
    if doc.label is not None:
        return _TRUTH_ALIASES.get(doc.label.strip().lower())
    for part in reversed(path.parts[:-1]):
        truth = _TRUTH_ALIASES.get(part.lower())
        if truth:
            return truth
    return None


def parse_band(value: str) -> tuple[float, float]:
    try:
        low, high = (float(x) for x in value.split(":"))
    except ValueError:
        raise click.BadParameter(f"expected LOW:HIGH, got {value!r}") from None
    return low, high


def parse_thresholds(values: str | None, span: str | None) -> list[float]:
    if values:
        try:
            return sorted(float(x) for x in values.split(",") if x.strip())
        except ValueError:
            raise click.BadParameter(f"bad threshold list {values!r}") from None
    if span:
        try:
            start, stop, step = (float(x) for x in span.split(":"))
        except ValueError:
            raise click.BadParameter(f"expected START:STOP:STEP, got {span!r}") from None
        if step <= 0 or stop < start:
            raise click.BadParameter(f"bad threshold range {span!r}")
        n = int(round((stop - start) / step))
        return [round(start + i * step, 10) for i in range(n + 1)]
    raise click.UsageError("pass --thresholds or --range")


def open_output(output):
    if output in (None, "-"):
        return contextlib.nullcontext(click.get_text_stream("stdout"))
    return open(output, "w", encoding="utf-8", newline="\n")


input_args = click.argument("inputs", nargs=-1, required=True, type=click.Path())
format_opt = click.option(
    "--format", "fmt", type=click.Choice(FORMATS), default=None, help="Corpus format (default: from file extension)."
)
output_opt = click.option("-o", "--output", default=None, help="Output file (default: stdout).")


@click.group()
@click.version_option(__version__, prog_name="profiler")
@click.option(
    "--config",
    "config_path",
    type=click.Path(dir_okay=False),
    default=None,
    help=f"TOML configuration file (falls back to ${ENV_VAR}, then built-in defaults).",
)
@click.option("-j", "--jobs", type=click.IntRange(min=1), default=None, help="Worker processes (default: CPU count).")
@click.option("-q", "--quiet", is_flag=True, help="Suppress progress events on stderr.")
@click.pass_context
def cli(ctx, config_path, jobs, quiet):
    """Heuristic phishing risk profiler for email corpora."""
    ctx.ensure_object(dict)
    ctx.obj.update(config_path=config_path or os.environ.get(ENV_VAR) or None, jobs=jobs, quiet=quiet)


def _run(ctx) -> Run:
    cfg = load_config(ctx.obj["config_path"])
    return Run(cfg, ctx.obj["jobs"] or default_jobs(), ctx.obj["quiet"])


@cli.command()
@input_args
@format_opt
@output_opt
@click.pass_context
def score(ctx, inputs, fmt, output):
    """Score every email and write one JSON assessment per line."""
    run = _run(ctx)
    assessments = run.assessed(inputs, fmt)
    with open_output(output) as out:
        for a in assessments:
            out.write(json.dumps(a.to_dict()) + "\n")
    return run.finish(output)


def _labelled_scores(run, inputs, fmt):
    paths = []
    docs = []
    assessments = list(run.assessed(inputs, fmt, keep=lambda d, p: (docs.append(d), paths.append(p))))
    out, missing = [], []
    for doc, path, a in zip(docs, paths, assessments):
        truth = truth_for(doc, path)
        if truth is None:
            missing.append(doc.source_id)
        else:
            out.append(LabelledScore(a.source_id, a.final_score, truth))
    if missing:
        raise click.UsageError(
            f"{len(missing)} email(s) have no truth label (jsonl 'label' field or legit/ phish/ directory), "
            f"first: {missing[0]}"
        )
    if not out:
        raise click.UsageError("no labelled emails to evaluate")
    return out


@cli.command("evaluate")
@input_args
@format_opt
@output_opt
@click.option("--threshold", type=click.FloatRange(min=0), default=None, help="Classification threshold.")
@click.option("--histogram", "histogram_csv", default=None, help="Also write the score histogram as CSV.")
@click.option("--bin-width", type=click.FloatRange(min=0, min_open=True), default=0.1, show_default=True)
@click.option("--hist-max", type=float, default=1.0, show_default=True, help="Histogram upper bound.")
@click.pass_context
def evaluate_cmd(ctx, inputs, fmt, output, threshold, histogram_csv, bin_width, hist_max):
    """Confusion counts and rates for a labelled corpus."""
    run = _run(ctx)
    scores = _labelled_scores(run, inputs, fmt)
    t = run.config.thresholds.single if threshold is None else threshold
    report = evaluate(scores, t).to_dict()
    hist = build_histogram((s.score for s in scores), 0.0, hist_max, bin_width)
    report["histogram"] = hist.to_dict()
    with open_output(output) as out:
        out.write(json.dumps(report, indent=2) + "\n")
    if histogram_csv:
        Path(histogram_csv).write_text(hist.to_csv(), encoding="utf-8")
    return run.finish(output)


@cli.command()
@input_args
@format_opt
@output_opt
@click.option("--threshold", type=click.FloatRange(min=0), default=None, help="Binary threshold.")
@click.option("--band", default=None, metavar="LOW:HIGH", help="Triage band; emails inside it are 'uncertain'.")
@click.pass_context
def label(ctx, inputs, fmt, output, threshold, band):
    """Auto-label a corpus: assessments with a verdict attached."""
    if threshold is not None and band is not None:
        raise click.UsageError("--threshold and --band are mutually exclusive")
    run = _run(ctx)
    t = run.config.thresholds
    if band is not None:
        low, high = parse_band(band)
        t = ThresholdConfig(t.single, low, high).validate()
        mode = "banded"
    else:
        t = ThresholdConfig(t.single if threshold is None else threshold, t.low, t.high)
        mode = "binary"
    labelled = label_assessments(run.assessed(inputs, fmt), t, mode)
    with open_output(output) as out:
        for a in labelled:
            out.write(json.dumps(a.to_dict()) + "\n")
    return run.finish(output)


@cli.command()
@input_args
@format_opt
@output_opt
@click.option("--thresholds", "values", default=None, help="Comma-separated thresholds.")
@click.option("--range", "span", default=None, metavar="START:STOP:STEP", help="Inclusive threshold range.")
@click.option("--as", "as_", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.pass_context
def sweep(ctx, inputs, fmt, output, values, span, as_):
    """Evaluate a labelled corpus across many thresholds."""
    thresholds = parse_thresholds(values, span)
    run = _run(ctx)
    scores = _labelled_scores(run, inputs, fmt)
    reports = threshold_sweep(scores, thresholds)
    with open_output(output) as out:
        if as_ == "csv":
            out.write(sweep_csv(reports))
        else:
            out.write(json.dumps([r.to_dict() for r in reports], indent=2) + "\n")
    return run.finish(output)


@cli.command("init-config")
@click.option("-o", "--output", default=None, help="Where to write the file (default: stdout).")
def init_config(output):
    """Write the annotated default configuration."""
    if output in (None, "-"):
        click.echo(DEFAULT_CONFIG_TEXT, nl=False)
    else:
        Path(output).write_text(DEFAULT_CONFIG_TEXT, encoding="utf-8")
    return EXIT_OK


def main(argv=None) -> int:
    try:
        rv = cli.main(args=argv, prog_name="profiler", standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    except click.Abort:
        return EXIT_USAGE
    except (ConfigError, EvaluationError) as exc:
        click.echo(f"Error: {exc}", err=True)
        return EXIT_USAGE
    except OSError as exc:
        click.echo(f"Error: {exc}", err=True)
        return EXIT_DATA
    return rv if isinstance(rv, int) else EXIT_OK


def run():
    sys.exit(main())
