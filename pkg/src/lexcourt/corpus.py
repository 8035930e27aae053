"""Case collections: loading from disk, passage segmentation, statistics.

A corpus is a directory of UTF-8 ".txt" files, one case per file; the case
id is the filename stem. Relevance labels (qrels) are a two-column TSV of
"query_id<TAB>notice_id" pairs.
"""

from __future__ import annotations

import re
import statistics
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable

from . import textproc
from .errors import ValidationError

# A line starting (after indentation) with "[12]" marks a new numbered
# paragraph; blank lines separate unnumbered paragraphs.
_PARA_MARKER_RE = re.compile(r"\[\d+\]")


@dataclass(frozen=True)
class Passage:
    case_id: str
    passage_index: int
    text: str


@dataclass(frozen=True)
class Case:
    case_id: str
    raw_text: str
    passages: tuple[Passage, ...]
    is_query: bool = False

    @property
    def n_passages(self) -> int:
        return len(self.passages)


@dataclass
class Collection:
    """Immutable after construction; cases keyed by case_id."""

    cases: dict[str, Case]
    qrels: dict[str, frozenset[str]]

    @property
    def labeled(self) -> bool:
        return bool(self.qrels)

    def query_ids(self) -> list[str]:
        return sorted(cid for cid, case in self.cases.items() if case.is_query)

    def __len__(self) -> int:
        return len(self.cases)


@dataclass(frozen=True)
class CollectionStats:
    total_cases: int
    query_cases: int
    max_tokens: int
    median_tokens: float
    mean_tokens: float
    max_notices: int | None = None
    median_notices: float | None = None
    mean_notices: float | None = None

    def to_json_dict(self) -> dict:
        return asdict(self)


def split_passages(case_text: str) -> list[str]:
    """Segment a case at paragraph boundaries.

    A boundary is one or more blank lines, or a line beginning with a
    bracketed paragraph number like "[7]". Numbered-paragraph markers stay
    part of their passage; empty segments are dropped. Text with no
    boundaries comes back as a single passage.
    """
    segments: list[list[str]] = []
    current: list[str] = []
    for line in case_text.splitlines():
        stripped = line.strip()
        if not stripped:
            if current:
                segments.append(current)
                current = []
            continue
        if _PARA_MARKER_RE.match(stripped) and current:
            segments.append(current)
            current = [line]
            continue
        current.append(line)
    if current:
        segments.append(current)
    texts = ("\n".join(seg).strip() for seg in segments)
    return [t for t in texts if t]


def make_case(case_id: str, raw_text: str, is_query: bool = False) -> Case:
    passages = tuple(
        Passage(case_id, i, text) for i, text in enumerate(split_passages(raw_text))
    )
    if not passages:
        raise ValidationError(f"case {case_id!r} has no text")
    return Case(case_id=case_id, raw_text=raw_text, passages=passages, is_query=is_query)


def load_qrels(path: str | Path) -> dict[str, frozenset[str]]:
    """Parse a qrels TSV: "query_id<TAB>notice_id", '#' comments allowed."""
    pairs: dict[str, set[str]] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        entry = line.split("#", 1)[0].strip()
        if not entry:
            continue
        fields = entry.split("\t")
        if len(fields) != 2 or not fields[0].strip() or not fields[1].strip():
            raise ValidationError(f"{path}:{lineno}: expected 'query_id<TAB>notice_id'")
        pairs.setdefault(fields[0].strip(), set()).add(fields[1].strip())
    return {q: frozenset(rel) for q, rel in pairs.items()}


def load_id_list(path: str | Path) -> list[str]:
    """Read a one-id-per-line file ('#' comments allowed), order preserved."""
    ids = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        entry = line.split("#", 1)[0].strip()
        if entry:
            ids.append(entry)
    return ids


def load_collection(
    corpus_dir: str | Path,
    qrels_path: str | Path | None = None,
    query_list_path: str | Path | None = None,
) -> Collection:
    """Load every ".txt" case in lexicographic filename order.

    Queries are the ids in query_list_path when given, otherwise the qrels
    keys. Raises ValidationError for empty case files, unknown ids in the
    qrels or query list, and queries without relevance labels in a labeled
    collection.
    """
    corpus_dir = Path(corpus_dir)
    if not corpus_dir.is_dir():
        raise FileNotFoundError(f"corpus directory not found: {corpus_dir}")
    paths = sorted(corpus_dir.glob("*.txt"))
    if not paths:
        raise ValidationError(f"no .txt case files in {corpus_dir}")

    qrels = load_qrels(qrels_path) if qrels_path is not None else {}
    if query_list_path is not None:
        query_ids = set(load_id_list(query_list_path))
    else:
        query_ids = set(qrels)

    cases: dict[str, Case] = {}
    for path in paths:
        case_id = path.stem
        text = path.read_text(encoding="utf-8")
        if not text.strip():
            raise ValidationError(f"case file is empty: {path}")
        cases[case_id] = make_case(case_id, text, is_query=case_id in query_ids)

    known = cases.keys()
    unknown = sorted(
        {q for q in qrels if q not in known}
        | {n for rel in qrels.values() for n in rel if n not in known}
        | {q for q in query_ids if q not in known}
    )
    if unknown:
        raise ValidationError(f"ids not present in corpus: {', '.join(unknown)}")
    if qrels:
        unlabeled = sorted(q for q in query_ids if q not in qrels)
        if unlabeled:
            raise ValidationError(f"queries without relevance labels: {', '.join(unlabeled)}")
    return Collection(cases=cases, qrels=qrels)


def collection_stats(
    collection: Collection,
    tokenizer: Callable[[str], list[str]] = textproc.tokenize,
) -> CollectionStats:
    """Corpus-shape statistics; token counts use the raw tokenizer."""
    token_counts = [len(tokenizer(c.raw_text)) for _, c in sorted(collection.cases.items())]
    queries = collection.query_ids()
    notice_stats: dict[str, float | int | None] = {
        "max_notices": None,
        "median_notices": None,
        "mean_notices": None,
    }
    if collection.labeled and queries:
        notice_counts = [len(collection.qrels.get(q, frozenset())) for q in queries]
        notice_stats = {
            "max_notices": max(notice_counts),
            "median_notices": float(statistics.median(notice_counts)),
            "mean_notices": float(statistics.mean(notice_counts)),
        }
    return CollectionStats(
        total_cases=len(collection.cases),
        query_cases=len(queries),
        max_tokens=max(token_counts),
        median_tokens=float(statistics.median(token_counts)),
        mean_tokens=float(statistics.mean(token_counts)),
        **notice_stats,
    )
