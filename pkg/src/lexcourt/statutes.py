"""Statute catalog, citation detection, and passage annotation.

Statute titles from a catalog file are cleaned (truncated after the first
"regulations", "order", "act" or "rules"), given acronym candidates, and
matched against case text. Section numbers are detected behind an explicit
cue word ("section 18.1(4)", "ss. 96 and 97"); each section is attributed
to the statute it most often shares a passage with, and every passage
carrying that section gets a (statute, section) annotation. Those
annotations feed the statute-section index field.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import Case, Collection
from .errors import ValidationError
from .textproc import _SECTION_NUMBER_PATTERN, is_section_citation_token

# Reserved statute id for sections that never co-occur with a mention.
UNKNOWN_STATUTE = "UNKNOWN"

_TITLE_KEYWORD_RE = re.compile(
    r"^(.*?\b(?:regulations|order|act|rules))\b", re.IGNORECASE | re.DOTALL
)

_SECTION_CUE_RE = re.compile(
    rf"\b(sections|section|subsection|ss\.|s\.)\s+({_SECTION_NUMBER_PATTERN})",
    re.IGNORECASE,
)
_PLURAL_CUES = frozenset({"sections", "ss."})
_SECTION_CONT_RE = re.compile(
    rf"\s*(?:,|\band\b|\bor\b|&)\s*({_SECTION_NUMBER_PATTERN})", re.IGNORECASE
)

_SLUG_RE = re.compile(r"[^a-z0-9]+")

Span = tuple[int, int]


@dataclass(frozen=True)
class StatuteTitle:
    statute_id: str
    raw_title: str
    cleaned_title: str
    acronym: str | None


@dataclass(frozen=True)
class StatuteSectionRef:
    statute_id: str
    section: str


class StatuteCatalog:
    """Cleaned statute titles with lookup indexes and match patterns."""

    def __init__(self, titles: Sequence[StatuteTitle]):
        self.titles = tuple(titles)
        self.title_index: dict[str, str] = {}
        self.acronym_index: dict[str, frozenset[str]] = {}
        acronyms: dict[str, set[str]] = {}
        for title in self.titles:
            self.title_index[title.cleaned_title.lower()] = title.statute_id
            if title.acronym:
                acronyms.setdefault(title.acronym, set()).add(title.statute_id)
        self.acronym_index = {a: frozenset(ids) for a, ids in acronyms.items()}
        # Title words may be separated by arbitrary whitespace in case text
        self._title_patterns = [
            (
                t.statute_id,
                re.compile(
                    r"\b" + r"\s+".join(re.escape(w) for w in t.cleaned_title.split()) + r"\b",
                    re.IGNORECASE,
                ),
            )
            for t in self.titles
        ]
        self._acronym_patterns = [
            (a, re.compile(r"\b" + re.escape(a) + r"\b"))
            for a in sorted(self.acronym_index)
        ]

    def __len__(self) -> int:
        return len(self.titles)


def clean_title(raw_title: str) -> str:
    """Truncate a raw title after the first statute-type keyword.

    "Income Tax Act (R.S.C., 1985, c. 1)" -> "Income Tax Act"; titles
    without any keyword are returned trimmed. Idempotent.
    """
    trimmed = raw_title.strip()
    match = _TITLE_KEYWORD_RE.match(trimmed)
    return match.group(1) if match else trimmed


def make_acronym(cleaned_title: str) -> str | None:
    """First letters of the uppercase-initial tokens; None when too short.

    "Immigration and Refugee Protection Act" -> "IRPA" (the lowercase
    "and" is skipped). Single letters are too ambiguous to index.
    """
    letters = [tok[0] for tok in cleaned_title.split() if tok[0].isupper()]
    return "".join(letters) if len(letters) >= 2 else None


def _slug(cleaned_title: str) -> str:
    return _SLUG_RE.sub("-", cleaned_title.lower()).strip("-")


def load_statute_titles(path: str | Path) -> StatuteCatalog:
    """Build a catalog from a one-raw-title-per-line file.

    Lines cleaning to the same title are merged under one statute id.
    """
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return build_catalog(lines)


def build_catalog(raw_titles: Iterable[str]) -> StatuteCatalog:
    titles: list[StatuteTitle] = []
    seen: set[str] = set()
    for raw in raw_titles:
        raw = raw.strip()
        if not raw:
            continue
        cleaned = clean_title(raw)
        statute_id = _slug(cleaned)
        if not statute_id or statute_id in seen:
            continue
        seen.add(statute_id)
        titles.append(
            StatuteTitle(
                statute_id=statute_id,
                raw_title=raw,
                cleaned_title=cleaned,
                acronym=make_acronym(cleaned),
            )
        )
    return StatuteCatalog(titles)


def detect_statute_mentions(text: str, catalog: StatuteCatalog) -> list[tuple[str, Span]]:
    """Find statute mentions by cleaned title or generated acronym.

    Titles match case-insensitively with overlaps resolved longest-first;
    acronyms match case-sensitively as whole words ("IRPA" but never
    "irpa"), and an ambiguous acronym yields one mention per candidate.
    """
    candidates: list[tuple[int, int, str]] = []
    for statute_id, pattern in catalog._title_patterns:
        for m in pattern.finditer(text):
            candidates.append((m.start(), m.end(), statute_id))
    # longest match wins; ties resolved by position then id for determinism
    candidates.sort(key=lambda c: (-(c[1] - c[0]), c[0], c[2]))
    kept: list[tuple[int, int, str]] = []
    for start, end, statute_id in candidates:
        if all(end <= k_start or start >= k_end for k_start, k_end, _ in kept):
            kept.append((start, end, statute_id))

    mentions = [(sid, (start, end)) for start, end, sid in kept]
    for acronym, pattern in catalog._acronym_patterns:
        for m in pattern.finditer(text):
            for statute_id in sorted(catalog.acronym_index[acronym]):
                mentions.append((statute_id, (m.start(), m.end())))
    mentions.sort(key=lambda m: (m[1][0], m[1][1], m[0]))
    return mentions


def detect_section_numbers(text: str) -> list[tuple[str, Span]]:
    """Find cued section numbers; bare numbers are not citations here.

    A plural cue ("ss.", "sections") expands over conjunctions:
    "ss. 96 and 97" yields both 96 and 97.
    """
    found: list[tuple[str, Span]] = []
    pos = 0
    while True:
        m = _SECTION_CUE_RE.search(text, pos)
        if m is None:
            break
        found.append((m.group(2).lower(), (m.start(2), m.end(2))))
        pos = m.end()
        if m.group(1).lower() in _PLURAL_CUES:
            while True:
                cont = _SECTION_CONT_RE.match(text, pos)
                if cont is None:
                    break
                found.append((cont.group(1).lower(), (cont.start(1), cont.end(1))))
                pos = cont.end()
    return found


class PassageAnnotations:
    """Per-passage statute-section refs plus the detected mention spans."""

    def __init__(
        self,
        refs: Mapping[tuple[str, int], Sequence[StatuteSectionRef]] | None = None,
        mentions: Mapping[tuple[str, int], Sequence[tuple[str, Span]]] | None = None,
    ):
        self.refs: dict[tuple[str, int], tuple[StatuteSectionRef, ...]] = {
            key: tuple(value) for key, value in (refs or {}).items() if value
        }
        self.mentions: dict[tuple[str, int], tuple[tuple[str, Span], ...]] = {
            key: tuple(value) for key, value in (mentions or {}).items() if value
        }

    def refs_for(self, case_id: str, passage_index: int) -> tuple[StatuteSectionRef, ...]:
        return self.refs.get((case_id, passage_index), ())

    def section_count(self, case_id: str, passage_index: int) -> int:
        """Number of statute-section refs on the passage (s_n of the boost rule)."""
        return len(self.refs_for(case_id, passage_index))

    def merge(self, other: "PassageAnnotations") -> "PassageAnnotations":
        refs = dict(self.refs)
        refs.update(other.refs)
        mentions = dict(self.mentions)
        mentions.update(other.mentions)
        return PassageAnnotations(refs, mentions)

    def __eq__(self, other: object) -> bool:
        # refs are the payload; mention spans are diagnostic and don't
        # survive TSV round-trips
        return isinstance(other, PassageAnnotations) and self.refs == other.refs

    def __len__(self) -> int:
        return len(self.refs)

    # refs serialize to TSV for reuse; mention spans are diagnostic only
    def save_tsv(self, path: str | Path) -> None:
        lines = []
        for (case_id, idx) in sorted(self.refs):
            for ref in self.refs[(case_id, idx)]:
                lines.append(f"{case_id}\t{idx}\t{ref.statute_id}\t{ref.section}")
        Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")

    @classmethod
    def load_tsv(cls, path: str | Path) -> "PassageAnnotations":
        refs: dict[tuple[str, int], list[StatuteSectionRef]] = {}
        for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            entry = line.split("#", 1)[0].rstrip()
            if not entry:
                continue
            fields = entry.split("\t")
            if len(fields) != 4:
                raise ValidationError(f"{path}:{lineno}: expected 4 tab-separated fields")
            case_id, idx, statute_id, section = fields
            if not is_section_citation_token(section):
                raise ValidationError(f"{path}:{lineno}: malformed section {section!r}")
            refs.setdefault((case_id, int(idx)), []).append(
                StatuteSectionRef(statute_id, section)
            )
        return cls(refs)

    def to_json_dict(self) -> dict:
        out: dict[str, dict[str, list[list[str]]]] = {}
        for (case_id, idx), refs in sorted(self.refs.items()):
            out.setdefault(case_id, {})[str(idx)] = [
                [r.statute_id, r.section] for r in refs
            ]
        return out

    @classmethod
    def from_json_dict(cls, data: dict) -> "PassageAnnotations":
        refs = {
            (case_id, int(idx)): [StatuteSectionRef(sid, sec) for sid, sec in pairs]
            for case_id, by_idx in data.items()
            for idx, pairs in by_idx.items()
        }
        return cls(refs)


def field_term(ref: StatuteSectionRef) -> str:
    """Index term for a ref: lowercase statute id and section joined by '#'."""
    return f"{ref.statute_id.lower()}#{ref.section}"


def map_sections_to_statutes(case: Case, catalog: StatuteCatalog) -> PassageAnnotations:
    """Attribute each section in a case to its dominant co-occurring statute.

    For every distinct section string, count the passages where it appears
    together with each statute mention; the most frequent statute wins,
    ties going to the lexicographically smallest statute id. Sections with
    no co-occurring statute anywhere in the case map to UNKNOWN. Every
    passage containing a section is annotated with the assigned pair.
    """
    passage_sections: list[set[str]] = []
    passage_statutes: list[set[str]] = []
    mention_spans: dict[tuple[str, int], tuple[tuple[str, Span], ...]] = {}
    for passage in case.passages:
        mentions = detect_statute_mentions(passage.text, catalog)
        sections = {sec for sec, _ in detect_section_numbers(passage.text)}
        passage_sections.append(sections)
        passage_statutes.append({sid for sid, _ in mentions})
        if mentions:
            mention_spans[(case.case_id, passage.passage_index)] = tuple(mentions)

    cooccur: dict[str, Counter[str]] = {}
    for sections, mentioned in zip(passage_sections, passage_statutes):
        for section in sections:
            counts = cooccur.setdefault(section, Counter())
            for statute_id in mentioned:
                counts[statute_id] += 1

    assigned: dict[str, str] = {}
    for section, counts in cooccur.items():
        if counts:
            assigned[section] = min(counts, key=lambda sid: (-counts[sid], sid))
        else:
            assigned[section] = UNKNOWN_STATUTE

    refs: dict[tuple[str, int], list[StatuteSectionRef]] = {}
    for passage, sections in zip(case.passages, passage_sections):
        if sections:
            refs[(case.case_id, passage.passage_index)] = [
                StatuteSectionRef(assigned[section], section)
                for section in sorted(sections)
            ]
    return PassageAnnotations(refs, mention_spans)


def annotate_collection(collection: Collection, catalog: StatuteCatalog) -> PassageAnnotations:
    """Union of per-case annotations over the whole collection."""
    annotations = PassageAnnotations()
    for case_id in sorted(collection.cases):
        annotations = annotations.merge(map_sections_to_statutes(collection.cases[case_id], catalog))
    return annotations
