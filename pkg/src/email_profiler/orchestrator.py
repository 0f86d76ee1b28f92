"""Run the three models on an email and combine them into one risk score."""
from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator

from .cognitive import CognitiveScore, assess_cognition
from .config import ConfigError, ProfilerConfig, default_config
from .ingest import EmailDocument
from .profiles import assess_profile, classify_profile
from .textprep import normalize_text
from .threat import ThreatFeatures, assess_threat

LEGITIMATE = "legitimate"
PHISHING = "phishing"
UNCERTAIN = "uncertain"
VERDICTS = (LEGITIMATE, PHISHING, UNCERTAIN)


@dataclass(frozen=True)
class RiskAssessment:
    source_id: str
    threat_score: float
    threat_features: ThreatFeatures
    cognitive: CognitiveScore
    cognitive_score: float  # total after the optional floor
    profile_label: str
    profile_score: float
    final_score: float
    model_weights: dict = field(default_factory=lambda: {"threat": 1.0, "cognitive": 1.0, "profile": 1.0})
    diagnostics: tuple = ()
    verdict: str | None = None

    def recompute(self) -> float:
        """Product of the recorded model outputs and weights, computed independently."""
        w = self.model_weights
        return math.prod(
            (
                self.threat_score * w["threat"],
                self.cognitive_score * w["cognitive"],
                self.profile_score * w["profile"],
            )
        )

    def with_verdict(self, verdict: str) -> "RiskAssessment":
        return replace(self, verdict=verdict)

    def to_dict(self) -> dict:
        return {
            "source_id": self.source_id,
            "threat_score": self.threat_score,
            "threat_features": self.threat_features.to_dict(),
            "cognitive": self.cognitive.to_dict(),
            "cognitive_score": self.cognitive_score,
            "profile_label": self.profile_label,
            "profile_score": self.profile_score,
            "final_score": self.final_score,
            "model_weights": dict(self.model_weights),
            "diagnostics": list(self.diagnostics),
            "verdict": self.verdict,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RiskAssessment":
        return cls(
            source_id=d["source_id"],
            threat_score=d["threat_score"],
            threat_features=ThreatFeatures(**d["threat_features"]),
            cognitive=CognitiveScore(
                d["cognitive"]["scarcity"], d["cognitive"]["consistency"], d["cognitive"]["monetary"]
            ),
            cognitive_score=d["cognitive_score"],
            profile_label=d["profile_label"],
            profile_score=d["profile_score"],
            final_score=d["final_score"],
            model_weights=dict(d["model_weights"]),
            diagnostics=tuple(d.get("diagnostics", ())),
            verdict=d.get("verdict"),
        )


def assess_email(doc: EmailDocument, config: ProfilerConfig | None = None) -> RiskAssessment:
    config = config or default_config()
    stop = config.stopwords
    subject_tokens = normalize_text(doc.subject, stop)
    body_tokens = normalize_text(doc.body, stop)

    threat, features = assess_threat(
        doc.sender, doc.receiver_domain, config.trusted_domains, config.business_domains
    )
    diagnostics = ("malformed-sender-address",) if features.malformed_address else ()

    cognitive = assess_cognition(subject_tokens, body_tokens, config.lexicons)
    cognitive_score = cognitive.total
    if config.cognitive_floor and cognitive_score == 0:
        cognitive_score = 1

    label = classify_profile(subject_tokens, config.profile_rules)
    profile = assess_profile(label, config.profile_rules)

    w = config.model_weights
    final = (threat * w["threat"]) * (cognitive_score * w["cognitive"]) * (profile * w["profile"])
    return RiskAssessment(
        source_id=doc.source_id,
        threat_score=threat,
        threat_features=features,
        cognitive=cognitive,
        cognitive_score=cognitive_score,
        profile_label=label,
        profile_score=profile,
        final_score=final,
        model_weights=dict(w),
        diagnostics=diagnostics,
    )


def classify(score: float, threshold: float) -> str:
    """Phishing when ``score >= threshold``."""
    return PHISHING if score >= threshold else LEGITIMATE


def triage(score: float, low: float, high: float) -> str:
    if low > high:
        raise ConfigError(f"triage band low ({low}) exceeds high ({high})")
    if score < low:
        return LEGITIMATE
    if score >= high:
        return PHISHING
    return UNCERTAIN


# ---------------------------------------------------------------------------
# corpus scoring

_worker_config = None


def _init_worker(config):
    global _worker_config
    _worker_config = config


def _assess_batch(docs):
    return [assess_email(d, _worker_config) for d in docs]


def default_jobs() -> int:
    return os.cpu_count() or 1


def assess_stream(
    docs: Iterable[EmailDocument],
    config: ProfilerConfig | None = None,
    jobs: int = 1,
    batch_size: int = 500,
) -> Iterator[RiskAssessment]:
    """Order-preserving map of :func:`assess_email` over ``docs``.

    With ``jobs > 1`` batches are scored in worker processes; at most
    ``2 * jobs`` batches are in flight, so memory stays bounded.
    """
    config = config or default_config()
    if jobs <= 1:
        for doc in docs:
            yield assess_email(doc, config)
        return
    it = iter(docs)
    batches = iter(lambda: list(itertools.islice(it, batch_size)), [])
    with ProcessPoolExecutor(jobs, initializer=_init_worker, initargs=(config,)) as pool:
        pending = []
        for batch in batches:
            pending.append(pool.submit(_assess_batch, batch))
            if len(pending) >= 2 * jobs:
                yield from pending.pop(0).result()
        for fut in pending:
            yield from fut.result()
