import dataclasses
import math

import pytest
from hypothesis import given, strategies as st

from email_profiler.config import ConfigError, build_config
from email_profiler.ingest import EmailDocument
from email_profiler.orchestrator import (
    LEGITIMATE,
    PHISHING,
    UNCERTAIN,
    RiskAssessment,
    assess_email,
    assess_stream,
    classify,
    triage,
)


def doc(sender="attacker@evil.net", subject="", body="", receiver="bob@org.au"):
    return EmailDocument(sender, receiver, subject, body, "t")


def test_product_threat_cognitive_other(config):
    a = assess_email(doc(body="urgent reward"), config)
    assert (a.threat_score, a.cognitive.total, a.profile_label) == (0.9, 2, "Other")
    assert a.final_score == pytest.approx(1.8, rel=1e-12)


def test_zero_cognitive_annihilates(config):
    a = assess_email(doc(sender="alice@org.au", subject="Your receipt", body="thanks"), config)
    assert a.threat_score == 0.1 and a.cognitive.total == 0
    assert a.final_score == 0.0


def test_receipt_product(config):
    a = assess_email(doc(subject="Order receipt", body="urgent"), config)
    assert (a.threat_score, a.cognitive.total, a.profile_score) == (0.9, 1, 0.9)
    assert a.final_score == pytest.approx(0.81, rel=1e-12)


def test_cognitive_floor():
    cfg = build_config({"scoring": {"cognitive_floor": True}})
    a = assess_email(doc(body="hello there"), cfg)
    assert a.cognitive.total == 0 and a.cognitive_score == 1
    assert a.final_score == pytest.approx(0.9)


def test_malformed_sender_diagnostic(config):
    a = assess_email(doc(sender="nobody", body="urgent"), config)
    assert a.threat_score == 0.9
    assert "malformed-sender-address" in a.diagnostics


def test_deterministic(config):
    d = doc(subject="Congratulations", body="cash reward immediately")
    assert assess_email(d, config) == assess_email(d, config)


def test_dict_round_trip(config):
    a = assess_email(doc(subject="Congratulations", body="cash reward"), config).with_verdict(PHISHING)
    assert RiskAssessment.from_dict(a.to_dict()) == a


@pytest.mark.parametrize("model", ["threat", "cognitive", "profile"])
def test_doubling_weight_doubles_score(config, model):
    base = assess_email(doc(subject="Parcel delivery", body="cash reward urgent"), config)
    cfg = build_config({"model_weights": {model: 2.0}})
    doubled = assess_email(doc(subject="Parcel delivery", body="cash reward urgent"), cfg)
    assert doubled.final_score == pytest.approx(2 * base.final_score, rel=1e-12)
    assert doubled.recompute() == doubled.final_score


def test_classify_boundary():
    assert classify(0.49, 0.5) == LEGITIMATE
    assert classify(0.5, 0.5) == PHISHING
    assert classify(0, 0.5) == LEGITIMATE


@pytest.mark.parametrize("score,verdict", [(0.2, LEGITIMATE), (0.5, UNCERTAIN), (0.9, PHISHING), (0.3, UNCERTAIN)])
def test_triage(score, verdict):
    assert triage(score, 0.3, 0.9) == verdict


def test_triage_bad_band():
    with pytest.raises(ConfigError):
        triage(0.5, 0.9, 0.3)


SCORES = st.floats(min_value=0, max_value=100, allow_nan=False)


@given(SCORES, SCORES, SCORES)
def test_threshold_monotone(score, t1, t2):
    lo, hi = sorted((t1, t2))
    if classify(score, lo) == LEGITIMATE:
        assert classify(score, hi) == LEGITIMATE


@given(SCORES, SCORES)
def test_triage_degenerates_to_classify(score, t):
    assert triage(score, t, t) == classify(score, t)


WORDS = st.sampled_from(["urgent", "reward", "agreed", "hello", "delivery", "receipt", "welcome", "the", "cash"])


@given(st.lists(WORDS, max_size=10), st.lists(WORDS, max_size=30), st.sampled_from(["a@evil.net", "noreply@x.com", "bad"]))
def test_final_is_recomputed_product(config, subject, body, sender):
    a = assess_email(doc(sender=sender, subject=" ".join(subject), body=" ".join(body)), config)
    assert a.final_score >= 0
    assert math.isclose(
        a.final_score, a.threat_score * a.cognitive.total * a.profile_score, rel_tol=1e-12, abs_tol=0
    )
    assert a.final_score == a.recompute()


def test_stream_preserves_order(config):
    docs = [dataclasses.replace(doc(body="urgent " * i), source_id=str(i)) for i in range(25)]
    serial = list(assess_stream(docs, config, jobs=1))
    parallel = list(assess_stream(iter(docs), config, jobs=2, batch_size=4))
    assert [a.source_id for a in serial] == [str(i) for i in range(25)]
    assert parallel == serial
