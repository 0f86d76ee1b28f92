"""Manipulative-language counts (scarcity, consistency, monetary) over subject and body."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from . import kernels
from .textprep import StopwordList, normalize_text, read_word_file

log = logging.getLogger(__name__)

LEXICON_NAMES = ("scarcity", "consistency", "monetary")


class LexiconError(ValueError):
    pass


@dataclass(frozen=True)
class Lexicon:
    name: str
    entries: frozenset
    source: str = "builtin"

    def __post_init__(self):
        if self.name not in LEXICON_NAMES:
            raise LexiconError(f"unknown lexicon name {self.name!r}")
        if not self.entries:
            raise LexiconError(f"lexicon {self.name!r} is empty")


@dataclass(frozen=True)
class CognitiveScore:
    scarcity: int = 0
    consistency: int = 0
    monetary: int = 0

    @property
    def total(self) -> int:
        return self.scarcity + self.consistency + self.monetary

    def to_dict(self) -> dict:
        return {
            "scarcity": self.scarcity,
            "consistency": self.consistency,
            "monetary": self.monetary,
            "total": self.total,
        }


def build_lexicon(name: str, terms, stopwords: StopwordList, source: str = "builtin") -> Lexicon:
    entries = set()
    rejected = []
    for term in terms:
        tokens = normalize_text(term, stopwords)
        if tokens:
            entries.update(tokens)
        else:
            rejected.append(term)
    if rejected:
        log.warning("lexicon %s (%s): dropped entries that normalize away: %s", name, source, rejected)
    if not entries:
        raise LexiconError(f"lexicon {name!r} ({source}) has no usable entries")
    return Lexicon(name, frozenset(entries), source)


def load_lexicon(path: str | Path | None, name: str, stopwords: StopwordList) -> Lexicon:
    """Load a one-term-per-line lexicon file (``None`` loads the bundled default)."""
    if path is None:
        text = resources.files(__package__).joinpath(f"data/{name}.txt").read_text("utf-8")
        source = "builtin"
    else:
        text = Path(path).read_text("utf-8")
        source = str(path)
    return build_lexicon(name, read_word_file(text), stopwords, source)


def count_lexicon_hits(tokens, lexicon: Lexicon) -> int:
    """Occurrences (with multiplicity) of lexicon entries in ``tokens``."""
    return kernels.count_hits(tokens, lexicon.entries)


def assess_cognition(subject_tokens, body_tokens, lexicons) -> CognitiveScore:
    """Count hits of each lexicon over subject tokens followed by body tokens.

    ``lexicons`` maps lexicon name to :class:`Lexicon`.
    """
    tokens = list(subject_tokens) + list(body_tokens)
    counts = {name: count_lexicon_hits(tokens, lexicons[name]) for name in LEXICON_NAMES}
    return CognitiveScore(**counts)
