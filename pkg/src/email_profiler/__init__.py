"""Heuristic phishing risk profiling for email corpora.

Each email is scored by three models (sender threat level, manipulative
language count, email type weight) whose outputs are multiplied into a
single risk score.
"""
__version__ = "0.1.0"

from .config import ConfigError, ProfilerConfig, ThresholdConfig, load_config
from .ingest import EmailDocument, IngestError, RawEmail, iter_documents, parse_corpus
from .orchestrator import RiskAssessment, assess_email, classify, triage

__all__ = [
    "ConfigError",
    "EmailDocument",
    "IngestError",
    "ProfilerConfig",
    "RawEmail",
    "RiskAssessment",
    "ThresholdConfig",
    "assess_email",
    "classify",
    "iter_documents",
    "load_config",
    "parse_corpus",
    "triage",
]
