"""Text normalization shared by the cognitive and profile models."""
from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from . import kernels

MIN_TOKEN_LENGTH = 3


@dataclass(frozen=True)
class StopwordList:
    words: frozenset
    source: str = "builtin"

    def __post_init__(self):
        for w in self.words:
            if not w or w != w.lower():
                raise ValueError(f"stop word {w!r} must be non-empty lowercase")

    def __contains__(self, word):
        return word in self.words

    def __len__(self):
        return len(self.words)


def read_word_file(text: str) -> list[str]:
    """Return the entries of a one-term-per-line file, skipping blanks and ``#`` comments."""
    out = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(line)
    return out


def load_stopwords(path: str | Path | None = None) -> StopwordList:
    if path is None:
        text = resources.files(__package__).joinpath("data/stopwords.txt").read_text("utf-8")
        source = "builtin"
    else:
        text = Path(path).read_text("utf-8")
        source = str(path)
    return StopwordList(frozenset(w.lower() for w in read_word_file(text)), source)


def normalize_text(text: str, stopwords: StopwordList) -> list[str]:
    """Split ``text`` on non-alphanumeric runs and keep lowercase tokens of 3+ chars
    that are not stop words, in their original order."""
    if not text:
        return []
    return kernels.tokenize(text, stopwords.words)
