"""Sender threat level: 0.1 for trusted or no-reply senders, 0.9 otherwise."""
from __future__ import annotations

import re
from dataclasses import dataclass

LOW = 0.1
HIGH = 0.9

DEFAULT_TRUSTED_DOMAINS = ("gov.au", "edu.au")
DEFAULT_BUSINESS_DOMAINS = (".com", ".org")

_NOREPLY_NOISE = re.compile(r"[\s\-_.]+")


class MalformedAddress(ValueError):
    pass


@dataclass(frozen=True)
class AddressParts:
    username: str
    domain: str


@dataclass(frozen=True)
class ThreatFeatures:
    no_reply_username: bool = False
    internal_domain: bool = False
    gov_domain: bool = False
    edu_domain: bool = False
    business_domain: bool = False
    # any configured trusted substring other than gov/edu
    other_trusted_domain: bool = False
    malformed_address: bool = False

    @property
    def trusted(self) -> bool:
        return (
            self.no_reply_username
            or self.internal_domain
            or self.gov_domain
            or self.edu_domain
            or self.other_trusted_domain
        )

    def to_dict(self) -> dict:
        return {
            "no_reply_username": self.no_reply_username,
            "internal_domain": self.internal_domain,
            "gov_domain": self.gov_domain,
            "edu_domain": self.edu_domain,
            "business_domain": self.business_domain,
            "other_trusted_domain": self.other_trusted_domain,
            "malformed_address": self.malformed_address,
        }


def split_address(address: str) -> AddressParts:
    """Split at the last ``@``; the domain is lowercased, the username kept verbatim."""
    username, sep, domain = address.strip().rpartition("@")
    if not sep or not username or not domain:
        raise MalformedAddress(f"not a username@domain address: {address!r}")
    return AddressParts(username, domain.lower())


def is_no_reply(username: str) -> bool:
    return "noreply" in _NOREPLY_NOISE.sub("", username).lower()


def extract_threat_features(
    parts: AddressParts,
    receiver_domain: str = "",
    trusted_domains=DEFAULT_TRUSTED_DOMAINS,
    business_domains=DEFAULT_BUSINESS_DOMAINS,
) -> ThreatFeatures:
    domain = parts.domain
    receiver_domain = receiver_domain.lower()
    return ThreatFeatures(
        no_reply_username=is_no_reply(parts.username),
        internal_domain=bool(receiver_domain) and domain == receiver_domain,
        gov_domain="gov.au" in trusted_domains and "gov.au" in domain,
        edu_domain="edu.au" in trusted_domains and "edu.au" in domain,
        business_domain=any(s in domain for s in business_domains),
        other_trusted_domain=any(
            s in domain for s in trusted_domains if s not in ("gov.au", "edu.au")
        ),
    )


def score_features(features: ThreatFeatures) -> float:
    # business_domain is reported but deliberately not part of the rule
    return LOW if features.trusted else HIGH


def assess_threat(
    sender: str,
    receiver_domain: str = "",
    trusted_domains=DEFAULT_TRUSTED_DOMAINS,
    business_domains=DEFAULT_BUSINESS_DOMAINS,
) -> tuple[float, ThreatFeatures]:
    """Return ``(score, features)`` for a sender address.

    A malformed address scores high and sets ``malformed_address``.
    """
    try:
        parts = split_address(sender)
    except MalformedAddress:
        return HIGH, ThreatFeatures(malformed_address=True)
    features = extract_threat_features(parts, receiver_domain, trusted_domains, business_domains)
    return score_features(features), features
