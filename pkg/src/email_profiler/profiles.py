"""Email type labelling from subject keywords, with a risk weight per label."""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from importlib import resources
from pathlib import Path

from .textprep import StopwordList, normalize_text

# Table order; also the tie-break order among equal weights.
PROFILE_LABELS = (
    "Welcome",
    "Work",
    "JobSearch",
    "Update",
    "Receipt",
    "Congratulatory",
    "Delivery",
    "Other",
)
FALLBACK = "Other"

DEFAULT_WEIGHTS = {
    "Welcome": 0.1,
    "Work": 0.1,
    "JobSearch": 0.3,
    "Update": 0.5,
    "Receipt": 0.9,
    "Congratulatory": 2.0,
    "Delivery": 2.0,
    "Other": 1.0,
}


class ProfileRulesError(ValueError):
    pass


@dataclass(frozen=True)
class ProfileRules:
    keywords: tuple  # ((label, frozenset of keywords), ...) in table order
    weights: dict
    source: str = "builtin"

    def __post_init__(self):
        problems = []
        for label, weight in self.weights.items():
            if label not in PROFILE_LABELS:
                problems.append(f"unknown profile label {label!r}")
            elif not weight > 0:
                problems.append(f"weight for {label} must be positive, got {weight!r}")
        for label, words in self.keywords:
            if label == FALLBACK and words:
                problems.append("Other is the fallback and cannot have keywords")
        if problems:
            raise ProfileRulesError("; ".join(problems))

    @cached_property
    def resolution_order(self) -> tuple:
        """Labels with keywords, highest weight first, ties in table order."""
        ranked = sorted(
            (label for label, words in self.keywords if words),
            key=lambda label: (-self.weights[label], PROFILE_LABELS.index(label)),
        )
        kw = dict(self.keywords)
        return tuple((label, kw[label]) for label in ranked)

    def weight(self, label: str) -> float:
        return self.weights[label]


_SECTION = re.compile(r"^\[(\w+)\]\s*(\S+)?\s*$")


def parse_profile_rules(text: str, stopwords: StopwordList, source: str = "builtin") -> ProfileRules:
    """Parse ``[Label] weight`` sections each followed by one keyword per line.

    Labels absent from the file keep their default weight and have no keywords.
    """
    weights = dict(DEFAULT_WEIGHTS)
    keywords: dict[str, set] = {label: set() for label in PROFILE_LABELS}
    problems = []
    current = None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        m = _SECTION.match(line)
        if m:
            current, weight = m.groups()
            if current not in PROFILE_LABELS:
                problems.append(f"line {lineno}: unknown profile label {current!r}")
                current = None
                continue
            if weight is not None:
                try:
                    weights[current] = float(weight)
                except ValueError:
                    problems.append(f"line {lineno}: bad weight {weight!r}")
            continue
        if current is None:
            problems.append(f"line {lineno}: keyword {line!r} outside a label section")
            continue
        tokens = normalize_text(line, stopwords)
        if tokens != [line.lower()]:
            problems.append(f"line {lineno}: keyword {line!r} does not survive normalization")
            continue
        keywords[current].add(tokens[0])
    if problems:
        raise ProfileRulesError(f"{source}: " + "; ".join(problems))
    return ProfileRules(
        tuple((label, frozenset(keywords[label])) for label in PROFILE_LABELS),
        weights,
        source,
    )


def load_profile_rules(path: str | Path | None, stopwords: StopwordList) -> ProfileRules:
    if path is None:
        text = resources.files(__package__).joinpath("data/profile_rules.txt").read_text("utf-8")
        return parse_profile_rules(text, stopwords)
    return parse_profile_rules(Path(path).read_text("utf-8"), stopwords, str(path))


def classify_profile(subject_tokens, rules: ProfileRules) -> str:
    present = set(subject_tokens)
    for label, words in rules.resolution_order:
        if not present.isdisjoint(words):
            return label
    return FALLBACK


def assess_profile(label: str, rules: ProfileRules) -> float:
    return rules.weights[label]
