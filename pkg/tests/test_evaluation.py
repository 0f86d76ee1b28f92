import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from email_profiler.config import ConfigError, ThresholdConfig
from email_profiler.evaluation import (
    EvaluationError,
    EvaluationReport,
    LabelledScore,
    build_histogram,
    evaluate,
    label_assessments,
    percent,
    sweep_csv,
    threshold_sweep,
)
from email_profiler.ingest import EmailDocument
from email_profiler.orchestrator import assess_email


def corpus(legit_scores, phish_scores):
    out = [LabelledScore(f"l{i}", s, "legitimate") for i, s in enumerate(legit_scores)]
    out += [LabelledScore(f"p{i}", s, "phishing") for i, s in enumerate(phish_scores)]
    return out


def test_legitimate_rates():
    r = evaluate(corpus([0.0] * 7541 + [1.0] * 1525, []), 0.5)
    assert (r.tn, r.fp, r.n) == (7541, 1525, 9066)
    assert r.tnr == Fraction(7541, 9066)
    assert percent(r.tnr) == 83.2
    assert r.tpr is None


def test_phishing_rates():
    r = evaluate(corpus([], [1.0] * 629 + [0.0] * 264), 0.5)
    assert percent(r.tpr) == 70.4
    assert percent(r.fnr) == 29.6


def test_perfect_toy():
    r = evaluate(corpus([0.1, 0.2], [0.6, 5.0]), 0.5)
    assert r.accuracy == 1
    assert r.to_dict()["accuracy_pct"] == 100.0


def test_empty_corpus():
    with pytest.raises(EvaluationError):
        evaluate([], 0.5)


def test_bad_truth():
    with pytest.raises(EvaluationError):
        LabelledScore("x", 0.1, "spam")


def test_report_dict_has_fractions():
    d = evaluate(corpus([0.0, 1.0, 0.0], [1.0]), 0.5).to_dict()
    assert d["fpr"] == "1/3" and d["fpr_pct"] == 33.3
    assert d["tp"] + d["fp"] + d["tn"] + d["fn"] == d["n"] == 4


def test_percent_rounds_half_up():
    assert percent(Fraction(1, 2000)) == 0.1  # 0.05 %


def test_histogram_basic():
    h = build_histogram([0.05, 0.15, 0.95])
    assert h.counts == (1, 1, 0, 0, 0, 0, 0, 0, 0, 1) and h.overflow == 0


def test_histogram_upper_bound_exclusive():
    h = build_histogram([1.0, 1.8], hi=1)
    assert sum(h.counts) == 0 and h.overflow == 2


def test_histogram_empty():
    h = build_histogram([])
    assert h.counts == (0,) * 10 and h.overflow == 0


def test_histogram_exact_edges():
    # 0.3 must land in [0.3, 0.4) despite 3 * 0.1 > 0.3 in floating point
    h = build_histogram([0.0, 0.1, 0.2, 0.3, 0.6, 0.7, 0.9])
    assert h.counts == (1, 1, 1, 1, 0, 0, 1, 1, 0, 1)


def test_histogram_csv():
    text = build_histogram([0.05, 2.0]).to_csv().splitlines()
    assert text[0] == "bin_lower_edge,count"
    assert text[1] == "0.0,1"
    assert text[-1] == "overflow,1"


@pytest.mark.parametrize("kwargs", [{"bin_width": 0}, {"lo": 1, "hi": 1}, {"bin_width": -0.1}])
def test_histogram_bad_params(kwargs):
    with pytest.raises(ConfigError):
        build_histogram([0.1], **kwargs)


@given(st.lists(st.floats(min_value=0, max_value=60, allow_nan=False), max_size=200))
def test_histogram_conservation(scores):
    h = build_histogram(scores)
    assert sum(h.counts) + h.overflow == len(scores)


def brute_force(scores, t):
    tp = sum(1 for s in scores if s.truth == "phishing" and s.score >= t)
    fp = sum(1 for s in scores if s.truth == "legitimate" and s.score >= t)
    return tp, fp


def test_sweep_against_brute_force():
    rng = random.Random(7)
    scores = corpus([rng.uniform(0, 3) for _ in range(50)], [rng.uniform(0, 10) for _ in range(50)])
    reports = threshold_sweep(scores, [0.2, 0.5, 5])
    assert len(reports) == 3
    for r in reports:
        assert (r.tp, r.fp) == brute_force(scores, r.threshold)
    assert reports[0].fp >= reports[1].fp >= reports[2].fp


def test_sweep_single_equals_evaluate():
    scores = corpus([0.1, 0.7], [0.4, 0.9])
    assert threshold_sweep(scores, [0.5]) == [evaluate(scores, 0.5)]


def test_sweep_zero_threshold_flags_everything():
    (r,) = threshold_sweep(corpus([0.0, 0.3], [0.0]), [0])
    assert r.tp + r.fp == r.n


def test_sweep_must_be_sorted():
    with pytest.raises(EvaluationError):
        threshold_sweep(corpus([0.1], []), [0.5, 0.2])


def test_sweep_csv_rows():
    rows = sweep_csv(threshold_sweep(corpus([0.1], [0.9]), [0.0, 0.5])).splitlines()
    assert rows[0].startswith("threshold,n,tp,fp")
    assert len(rows) == 3


@given(
    st.lists(st.tuples(st.floats(0, 20, allow_nan=False), st.sampled_from(["legitimate", "phishing"])), min_size=1, max_size=60),
    st.lists(st.floats(0, 20, allow_nan=False), min_size=1, max_size=10),
)
def test_sweep_monotone_and_conserving(items, thresholds):
    scores = [LabelledScore(str(i), s, t) for i, (s, t) in enumerate(items)]
    reports = threshold_sweep(scores, sorted(thresholds))
    for r in reports:
        assert r.tp + r.fp + r.tn + r.fn == r.n == len(scores)
    for a, b in zip(reports, reports[1:]):
        assert a.tp + a.fp >= b.tp + b.fp
        assert a.tn + a.fn <= b.tn + b.fn


@given(st.lists(st.tuples(st.floats(0, 5, allow_nan=False), st.sampled_from(["legitimate", "phishing"])), min_size=1, max_size=40), st.randoms())
def test_evaluate_permutation_invariant(items, rnd):
    scores = [LabelledScore(str(i), s, t) for i, (s, t) in enumerate(items)]
    shuffled = list(scores)
    rnd.shuffle(shuffled)
    assert evaluate(scores, 0.5) == evaluate(shuffled, 0.5)


def _assessment(config, body):
    return assess_email(EmailDocument("a@evil.net", "b@org.au", "", body, "x"), config)


def test_label_binary(config):
    a = _assessment(config, "urgent reward")  # 1.8
    (out,) = label_assessments([a], ThresholdConfig(single=0.5), "binary")
    assert out.verdict == "phishing"


def test_label_banded(config):
    a = _assessment(config, "hello")
    a = a.__class__(**{**a.__dict__, "final_score": 0.4})
    (out,) = label_assessments([a], ThresholdConfig(low=0.3, high=0.9), "banded")
    assert out.verdict == "uncertain"


def test_label_empty():
    assert list(label_assessments([], ThresholdConfig(), "binary")) == []


def test_label_banded_validates():
    with pytest.raises(ConfigError):
        list(label_assessments([], ThresholdConfig(low=0.9, high=0.3), "banded"))


def test_report_from_counts():
    r = EvaluationReport(0.5, tp=2469, fp=0, tn=0, fn=823)
    assert percent(r.tpr) == 75.0
