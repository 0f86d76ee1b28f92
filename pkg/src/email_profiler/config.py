"""Runtime configuration: data files, domain lists, thresholds and model weights.

Everything the models treat as a constant lives here as data. A TOML file
overrides any subset of the defaults; ``profiler init-config`` writes the
annotated default file.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .cognitive import LEXICON_NAMES, LexiconError, load_lexicon
from .profiles import ProfileRules, ProfileRulesError, load_profile_rules
from .textprep import StopwordList, load_stopwords
from .threat import DEFAULT_BUSINESS_DOMAINS, DEFAULT_TRUSTED_DOMAINS

MODEL_NAMES = ("threat", "cognitive", "profile")
ENV_VAR = "PROFILER_CONFIG"


class ConfigError(ValueError):
    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("invalid configuration:\n" + "\n".join(f"  - {p}" for p in self.problems))


@dataclass(frozen=True)
class ThresholdConfig:
    single: float = 0.5
    low: float = 0.3
    high: float = 0.9

    def problems(self) -> list[str]:
        out = []
        for name in ("single", "low", "high"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                out.append(f"thresholds.{name} must be a number, got {value!r}")
            elif not value >= 0:
                out.append(f"thresholds.{name} must be >= 0, got {value!r}")
        if not out and self.low > self.high:
            out.append(f"thresholds.low ({self.low}) must not exceed thresholds.high ({self.high})")
        return out

    def validate(self) -> "ThresholdConfig":
        problems = self.problems()
        if problems:
            raise ConfigError(problems)
        return self


@dataclass(frozen=True)
class ProfilerConfig:
    stopwords: StopwordList
    lexicons: dict
    profile_rules: ProfileRules
    trusted_domains: tuple = DEFAULT_TRUSTED_DOMAINS
    business_domains: tuple = DEFAULT_BUSINESS_DOMAINS
    thresholds: ThresholdConfig = field(default_factory=ThresholdConfig)
    cognitive_floor: bool = False
    model_weights: dict = field(default_factory=lambda: {name: 1.0 for name in MODEL_NAMES})
    source: str = "defaults"


# section -> {key: default} for every accepted setting
_SCHEMA = {
    "text": {"stopwords": ""},
    "lexicons": {name: "" for name in LEXICON_NAMES},
    "profile": {"rules": ""},
    "threat": {
        "trusted_domains": list(DEFAULT_TRUSTED_DOMAINS),
        "business_domains": list(DEFAULT_BUSINESS_DOMAINS),
    },
    "thresholds": {"single": 0.5, "low": 0.3, "high": 0.9},
    "model_weights": {name: 1.0 for name in MODEL_NAMES},
    "scoring": {"cognitive_floor": False},
}

DEFAULT_CONFIG_TEXT = """\
# Email profiler configuration.
# Every key is optional; absent keys take the values shown here.
# Relative paths are resolved against the directory of this file.
# An empty path selects the data file bundled with the package.

[text]
# Stop-word list: one lowercase word per line, '#' comments allowed.
stopwords = ""

[lexicons]
# Cognitive model word lists, one term per line.
scarcity = ""
consistency = ""
monetary = ""

[profile]
# Profile rules: "[Label] weight" sections followed by subject keywords.
rules = ""

[threat]
# A sender domain containing any of these substrings is trusted (low threat).
trusted_domains = ["gov.au", "edu.au"]
# Reported as a feature only; does not change the threat score.
business_domains = [".com", ".org"]

[thresholds]
# Binary classification: score >= single is phishing.
single = 0.5
# Triage band: below low is legitimate, at or above high is phishing,
# anything in between is uncertain.
low = 0.3
high = 0.9

[model_weights]
# Each model's output is multiplied by its weight before the product.
threat = 1.0
cognitive = 1.0
profile = 1.0

[scoring]
# Replace a cognitive count of 0 with 1 so it does not zero the product.
cognitive_floor = false
"""


def _resolve(base: Path | None, value: str) -> Path | None:
    if not value:
        return None
    path = Path(value).expanduser()
    if base is not None and not path.is_absolute():
        path = base / path
    return path


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def build_config(data: dict | None = None, base_dir: Path | None = None, source: str = "defaults") -> ProfilerConfig:
    """Validate a parsed configuration mapping and load every file it names.

    All problems are collected and raised together as one :class:`ConfigError`.
    """
    data = data or {}
    problems: list[str] = []
    merged = {section: dict(values) for section, values in _SCHEMA.items()}
    for section, values in data.items():
        if section not in _SCHEMA:
            problems.append(f"unknown section [{section}]")
            continue
        if not isinstance(values, dict):
            problems.append(f"[{section}] must be a table")
            continue
        for key, value in values.items():
            if key not in _SCHEMA[section]:
                problems.append(f"unknown key {section}.{key}")
            else:
                merged[section][key] = value

    for section in ("text", "lexicons", "profile"):
        for key, value in merged[section].items():
            if not isinstance(value, str):
                problems.append(f"{section}.{key} must be a path string")
                merged[section][key] = ""
    for key in ("trusted_domains", "business_domains"):
        value = merged["threat"][key]
        if not isinstance(value, list) or not all(isinstance(s, str) and s for s in value):
            problems.append(f"threat.{key} must be a list of non-empty strings")
            merged["threat"][key] = list(_SCHEMA["threat"][key])
    for key, value in merged["model_weights"].items():
        if not _is_number(value) or not value > 0:
            problems.append(f"model_weights.{key} must be a positive number, got {value!r}")
    floor = merged["scoring"]["cognitive_floor"]
    if not isinstance(floor, bool):
        problems.append(f"scoring.cognitive_floor must be true or false, got {floor!r}")

    thresholds = ThresholdConfig(**merged["thresholds"])
    problems.extend(thresholds.problems())

    stopwords = lexicons = rules = None
    try:
        stopwords = load_stopwords(_resolve(base_dir, merged["text"]["stopwords"]))
    except (OSError, ValueError) as exc:
        problems.append(f"text.stopwords: {exc}")
    if stopwords is not None:
        lexicons = {}
        for name in LEXICON_NAMES:
            try:
                lexicons[name] = load_lexicon(_resolve(base_dir, merged["lexicons"][name]), name, stopwords)
            except (OSError, LexiconError) as exc:
                problems.append(f"lexicons.{name}: {exc}")
        try:
            rules = load_profile_rules(_resolve(base_dir, merged["profile"]["rules"]), stopwords)
        except (OSError, ProfileRulesError) as exc:
            problems.append(f"profile.rules: {exc}")

    if problems:
        raise ConfigError(problems)
    return ProfilerConfig(
        stopwords=stopwords,
        lexicons=lexicons,
        profile_rules=rules,
        trusted_domains=tuple(s.lower() for s in merged["threat"]["trusted_domains"]),
        business_domains=tuple(s.lower() for s in merged["threat"]["business_domains"]),
        thresholds=thresholds,
        cognitive_floor=floor,
        model_weights={k: float(v) for k, v in merged["model_weights"].items()},
        source=source,
    )


def load_config(path: str | Path | None = None) -> ProfilerConfig:
    """Load ``path`` (TOML) or, when ``None``, the built-in defaults."""
    if path is None:
        return build_config()
    path = Path(path)
    try:
        data = tomllib.loads(path.read_text("utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return build_config(data, path.parent, str(path))


_default = None


def default_config() -> ProfilerConfig:
    global _default
    if _default is None:
        _default = load_config()
    return _default
