"""Deterministic text normalization shared by indexing and query construction.

The pipeline applies, in a fixed order: placeholder removal, lowercasing,
stopword removal, short-token removal, number removal, stemming. Tokens
that look like statute section citations ("18.1(4)", "5(1)(a)", bare "96")
are exempt from the short-token and number filters and are never stemmed;
deciding whether a bare number really is a citation needs passage context
and happens in the statutes module.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from . import porter

# The default stopword inventory is the standard 33-word English list used
# by mainstream search engines.
DEFAULT_STOPWORDS = frozenset(
    """
    a an and are as at be but by for if in into is it no not of on or such
    that the their then there these they this to was will with
    """.split()
)

# Placeholder tokens substituted into the case files for removed references.
DEFAULT_PLACEHOLDERS = frozenset(
    {
        "FRAGMENT_SUPPRESSED",
        "REFERENCE_SUPPRESSED",
        "CITATION_SUPPRESSED",
        "DATE_SUPPRESSED",
    }
)

# Section-number grammar: digits, an optional ".digits" part, then any
# number of parenthesised all-digit or all-letter groups.
_SECTION_NUMBER_PATTERN = r"\d+(?:\.\d+)?(?:\((?:\d+|[A-Za-z]+)\))*"

_SECTION_TOKEN_RE = re.compile(_SECTION_NUMBER_PATTERN)

# Token characters are letters and digits; '.', '(' and ')' participate
# only inside a section-shaped token ("s. 18.1(4)" -> ["s", "18.1(4)"]).
_TOKEN_RE = re.compile(rf"{_SECTION_NUMBER_PATTERN}|[^\W_]+")


@dataclass(frozen=True)
class PipelineConfig:
    """Normalization options; defaults mirror the indexing setup."""

    stopwords: frozenset[str] = DEFAULT_STOPWORDS
    placeholders: frozenset[str] = DEFAULT_PLACEHOLDERS
    min_token_len: int = 3
    stemmer: str = "porter"

    def __post_init__(self) -> None:
        if self.min_token_len < 1:
            raise ValueError(f"min_token_len must be >= 1, got {self.min_token_len}")
        if self.stemmer not in ("porter", "none"):
            raise ValueError(f"unknown stemmer {self.stemmer!r}")

    def to_dict(self) -> dict:
        return {
            "stopwords": sorted(self.stopwords),
            "placeholders": sorted(self.placeholders),
            "min_token_len": self.min_token_len,
            "stemmer": self.stemmer,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        return cls(
            stopwords=frozenset(data["stopwords"]),
            placeholders=frozenset(data["placeholders"]),
            min_token_len=int(data["min_token_len"]),
            stemmer=data["stemmer"],
        )


def tokenize(text: str) -> list[str]:
    """Split text into raw tokens, keeping section citations intact."""
    return _TOKEN_RE.findall(text)


def is_section_citation_token(token: str) -> bool:
    """True iff the token matches the section-number grammar.

    Deliberately lenient at token level: bare numbers like "1985" pass;
    context-based disambiguation is the statutes module's job.
    """
    return _SECTION_TOKEN_RE.fullmatch(token) is not None


def normalize(
    tokens: Iterable[str],
    config: PipelineConfig | None = None,
    citation_tokens: Sequence[str] | None = None,
) -> list[str]:
    """Turn raw tokens into index terms.

    Steps, in order: drop placeholders (case-insensitive), lowercase, drop
    stopwords, drop tokens shorter than min_token_len, drop all-digit
    tokens, stem. Section-citation tokens are exempt from the length and
    number filters and are never stemmed.

    When ``citation_tokens`` is given (the sections that context analysis
    confirmed for this passage), an all-digit token survives the number
    filter only if listed there; without it any token passing the citation
    grammar is kept.
    """
    if config is None:
        config = PipelineConfig()
    placeholders = {p.casefold() for p in config.placeholders}
    confirmed = None if citation_tokens is None else set(citation_tokens)
    stem = config.stemmer == "porter"

    terms: list[str] = []
    for raw in tokens:
        if raw.casefold() in placeholders:
            continue
        token = raw.lower()
        if token in config.stopwords:
            continue
        citation = is_section_citation_token(token)
        if len(token) < config.min_token_len and not citation:
            continue
        if token.isdigit():
            if not citation:
                continue
            if confirmed is not None and token not in confirmed:
                continue
        if stem and not citation:
            token = porter.stem(token)
        terms.append(token)
    return terms


def analyze(text: str, config: PipelineConfig | None = None) -> list[str]:
    """tokenize + normalize in one step; the indexing entry point."""
    return normalize(tokenize(text), config)


def load_token_file(path: str | Path) -> frozenset[str]:
    """Read a one-token-per-line file ('#' comments allowed)."""
    tokens = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        entry = line.split("#", 1)[0].strip()
        if entry:
            tokens.add(entry)
    return frozenset(tokens)
