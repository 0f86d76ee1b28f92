"""Confusion counts, rates, score histograms, threshold sweeps and corpus labelling."""
from __future__ import annotations

import bisect
import csv
import io
import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from typing import Iterable, Sequence

from .config import ConfigError, ThresholdConfig
from .orchestrator import LEGITIMATE, PHISHING, classify, triage

TRUTHS = (LEGITIMATE, PHISHING)


class EvaluationError(ValueError):
    pass


@dataclass(frozen=True)
class LabelledScore:
    source_id: str
    score: float
    truth: str

    def __post_init__(self):
        if self.truth not in TRUTHS:
            raise EvaluationError(f"{self.source_id}: truth must be one of {TRUTHS}, got {self.truth!r}")
        if not self.score >= 0:
            raise EvaluationError(f"{self.source_id}: score must be >= 0, got {self.score!r}")


def _fraction(num: int, den: int) -> Fraction | None:
    return Fraction(num, den) if den else None


def percent(rate: Fraction | None) -> float | None:
    """Percentage rounded half-up to one decimal place."""
    if rate is None:
        return None
    value = Decimal(rate.numerator * 100) / Decimal(rate.denominator)
    return float(value.quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class EvaluationReport:
    threshold: float
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def n(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    # a rate is None when its truth class is empty
    @property
    def tpr(self):
        return _fraction(self.tp, self.tp + self.fn)

    @property
    def fnr(self):
        return _fraction(self.fn, self.tp + self.fn)

    @property
    def tnr(self):
        return _fraction(self.tn, self.tn + self.fp)

    @property
    def fpr(self):
        return _fraction(self.fp, self.tn + self.fp)

    @property
    def accuracy(self):
        return _fraction(self.tp + self.tn, self.n)

    RATES = ("tpr", "fpr", "tnr", "fnr", "accuracy")

    def to_dict(self) -> dict:
        out = {"threshold": self.threshold, "n": self.n, "tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn}
        for name in self.RATES:
            rate = getattr(self, name)
            out[name] = None if rate is None else f"{rate.numerator}/{rate.denominator}"
            out[f"{name}_pct"] = percent(rate)
        return out


def evaluate(scores: Sequence[LabelledScore], threshold: float) -> EvaluationReport:
    if not scores:
        raise EvaluationError("cannot evaluate an empty corpus")
    tp = fp = tn = fn = 0
    for item in scores:
        flagged = classify(item.score, threshold) == PHISHING
        if item.truth == PHISHING:
            if flagged:
                tp += 1
            else:
                fn += 1
        elif flagged:
            fp += 1
        else:
            tn += 1
    return EvaluationReport(threshold, tp, fp, tn, fn)


def threshold_sweep(scores: Sequence[LabelledScore], thresholds: Sequence[float]) -> list[EvaluationReport]:
    if not thresholds:
        raise EvaluationError("threshold list is empty")
    if any(b < a for a, b in zip(thresholds, thresholds[1:])):
        raise EvaluationError("thresholds must be sorted ascending")
    return [evaluate(scores, t) for t in thresholds]


def sweep_csv(reports: Iterable[EvaluationReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["threshold", "n", "tp", "fp", "tn", "fn", "tpr", "fpr", "tnr", "fnr", "accuracy"])
    for r in reports:
        rates = [getattr(r, name) for name in ("tpr", "fpr", "tnr", "fnr", "accuracy")]
        writer.writerow([r.threshold, r.n, r.tp, r.fp, r.tn, r.fn] + ["" if x is None else float(x) for x in rates])
    return buf.getvalue()


@dataclass(frozen=True)
class Histogram:
    lo: float
    hi: float
    bin_width: float
    counts: tuple
    overflow: int

    @property
    def edges(self) -> list[float]:
        return _edges(self.lo, self.bin_width, len(self.counts))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["bin_lower_edge", "count"])
        for edge, count in zip(self.edges, self.counts):
            writer.writerow([edge, count])
        writer.writerow(["overflow", self.overflow])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "lo": self.lo,
            "hi": self.hi,
            "bin_width": self.bin_width,
            "edges": self.edges,
            "counts": list(self.counts),
            "overflow": self.overflow,
        }


def _edges(lo: float, width: float, nbins: int) -> list[float]:
    # rounding keeps 0.1 * 3 from landing above 0.3
    return [round(lo + i * width, 12) for i in range(nbins)]


def build_histogram(scores: Iterable[float], lo: float = 0.0, hi: float = 1.0, bin_width: float = 0.1) -> Histogram:
    """Bin ``scores`` into ``[lo + i*w, lo + (i+1)*w)``; scores ``>= hi`` go to overflow."""
    if not bin_width > 0 or not lo < hi:
        raise ConfigError(f"bad histogram parameters lo={lo} hi={hi} bin_width={bin_width}")
    span = (hi - lo) / bin_width
    nbins = round(span) if math.isclose(span, round(span), rel_tol=1e-9) else math.ceil(span)
    edges = _edges(lo, bin_width, nbins)
    counts = [0] * nbins
    overflow = 0
    for s in scores:
        if s < lo:
            raise EvaluationError(f"score {s} is below histogram lower bound {lo}")
        if s >= hi:
            overflow += 1
        else:
            counts[bisect.bisect_right(edges, s) - 1] += 1
    return Histogram(lo, hi, bin_width, tuple(counts), overflow)


def label_assessments(assessments: Iterable, thresholds: ThresholdConfig, mode: str = "binary"):
    """Attach a verdict to each assessment: ``classify`` in binary mode, ``triage`` in banded mode."""
    if mode not in ("binary", "banded"):
        raise ValueError(f"unknown labelling mode {mode!r}")
    if mode == "banded":
        thresholds.validate()
    for a in assessments:
        if mode == "binary":
            verdict = classify(a.final_score, thresholds.single)
        else:
            verdict = triage(a.final_score, thresholds.low, thresholds.high)
        yield a.with_verdict(verdict)
