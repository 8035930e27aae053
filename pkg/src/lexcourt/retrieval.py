"""Query construction, unit search, and rank fusion back to case level.

Document-level retrieval turns a query case into one top-T term query.
Passage-level retrieval issues one query per query passage (its distinct
normalized tokens), scores passages with the chosen body scorer plus a
BM25-scored statute field weighted by s_b, boosts rankings whose query
passage cites at least one statute section, and fuses the per-passage
rankings with Reciprocal Rank Fusion:

    RRFscore(c) = sum over rankings r of p_b(r) / (k_rrf + r(c))

where r(c) is the rank of the case's best passage in r and absent cases
contribute nothing. Ties anywhere break on ascending id; the query case is
never returned.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .corpus import Case
from .index import InvertedIndex
from .scoring import BM25Params, LMParams, compound_score, tfidf_weight
from .statutes import PassageAnnotations, field_term
from .textproc import normalize, tokenize

logger = logging.getLogger(__name__)

SCORERS = ("bm25", "lm")

ScorerParams = BM25Params | LMParams


@dataclass(frozen=True)
class QueryExtractionParams:
    """Top-T query term selection; T=None keeps every distinct token."""

    T: int | None = None

    def __post_init__(self) -> None:
        if self.T is not None and self.T < 1:
            raise ValueError(f"T must be >= 1 or None, got {self.T}")


@dataclass(frozen=True)
class FusionParams:
    k_rrf: float = 60.0
    P_b: float = 1.0
    s_b: float = 0.0
    per_passage_depth: int = 100

    def __post_init__(self) -> None:
        if self.k_rrf <= 0:
            raise ValueError(f"k_rrf must be positive, got {self.k_rrf}")
        if self.P_b < 0 or self.s_b < 0:
            raise ValueError("P_b and s_b must be >= 0")
        if self.per_passage_depth < 1:
            raise ValueError(f"per_passage_depth must be >= 1, got {self.per_passage_depth}")


@dataclass(frozen=True)
class PassageQuery:
    case_id: str
    passage_index: int
    terms: tuple[str, ...]
    statute_terms: tuple[str, ...]
    s_n: int


@dataclass(frozen=True)
class CaseRanking:
    query_case_id: str
    results: tuple[tuple[str, float], ...]

    def case_ids(self) -> list[str]:
        return [cid for cid, _ in self.results]

    def __len__(self) -> int:
        return len(self.results)


def _rank_terms(counts: Counter[str], index: InvertedIndex, T: int | None) -> list[str]:
    weighted = [
        (term, tfidf_weight(tf, index.df("body", term), index.n_units))
        for term, tf in counts.items()
    ]
    weighted.sort(key=lambda item: (-item[1], item[0]))
    if T is not None:
        weighted = weighted[:T]
    return [term for term, _ in weighted]


def extract_query_terms(
    case: Case, index: InvertedIndex, params: QueryExtractionParams | None = None
) -> list[str]:
    """Rank a case's distinct terms by tf-idf and keep the top T.

    Term frequencies count occurrences in the whole case; document
    frequencies come from the index being searched, so passage-level runs
    use passage statistics. Normalization reuses the index pipeline.
    """
    params = params or QueryExtractionParams()
    counts = Counter(normalize(tokenize(case.raw_text), index.pipeline))
    if not counts:
        logger.warning("query case %s normalizes to zero terms", case.case_id)
        return []
    return _rank_terms(counts, index, params.T)


def build_passage_queries(
    case: Case,
    index: InvertedIndex,
    annotations: PassageAnnotations | None,
    T: int | None = None,
) -> list[PassageQuery]:
    """One query per passage: its distinct tokens, top-T by tf-idf if set."""
    queries = []
    for passage in case.passages:
        tokens = normalize(tokenize(passage.text), index.pipeline)
        counts = Counter(tokens)
        if T is not None:
            terms = tuple(_rank_terms(counts, index, T))
        else:
            terms = tuple(dict.fromkeys(tokens))  # distinct, first-occurrence order
        refs = annotations.refs_for(case.case_id, passage.passage_index) if annotations else ()
        queries.append(
            PassageQuery(
                case_id=case.case_id,
                passage_index=passage.passage_index,
                terms=terms,
                statute_terms=tuple(field_term(r) for r in refs),
                s_n=len(refs),
            )
        )
    return queries


def search_units(
    index: InvertedIndex,
    terms: Sequence[str],
    statute_terms: Sequence[str] = (),
    scorer: str = "bm25",
    params: ScorerParams | None = None,
    s_b: float = 0.0,
    depth: int = 100,
) -> list[tuple[int, float]]:
    """Score units against a term query and return the top ``depth``.

    The body field uses the chosen scorer; the statute field is always
    scored with BM25 and folded in as s_body + s_statute * s_b. Units
    scoring 0 are omitted; ties break on ascending unit id.
    """
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    if scorer not in SCORERS:
        raise ValueError(f"unknown scorer {scorer!r}, expected one of {SCORERS}")
    if params is None:
        params = BM25Params() if scorer == "bm25" else LMParams()

    # hot path: the scalar formulas of the scoring module, with per-term
    # constants hoisted and flat-array accumulators instead of dicts
    body = _accumulate_field(index, "body", terms, scorer, params)
    bm25_params = params if isinstance(params, BM25Params) else BM25Params()
    statute = _accumulate_field(index, "statute", statute_terms, "bm25", bm25_params)

    scored = []
    if body is None:
        body = statute  # statute-only query; s_body is 0 everywhere
        statute = None
        if body is None:
            return []
        for unit_id, s_statute in enumerate(body):
            total = compound_score(0.0, s_statute, s_b)
            if total > 0.0:
                scored.append((unit_id, total))
    elif statute is None:
        for unit_id, s_body in enumerate(body):
            if s_body > 0.0:
                scored.append((unit_id, s_body))
    else:
        for unit_id, s_body in enumerate(body):
            total = compound_score(s_body, statute[unit_id], s_b)
            if total > 0.0:
                scored.append((unit_id, total))
    scored.sort(key=lambda item: (-item[1], item[0]))
    return scored[:depth]


def _accumulate_field(
    index: InvertedIndex,
    field: str,
    terms: Sequence[str],
    scorer: str,
    params: ScorerParams,
) -> list[float] | None:
    """Per-unit score sums for one field, or None when nothing can match."""
    if not terms or index.total_terms(field) == 0:
        return None
    n_units = index.n_units
    lens = index.field_lens(field)
    scores = [0.0] * n_units
    if scorer == "bm25":
        avg_len = index.avg_len(field)
        k1, b = params.k1, params.b
        base = k1 * (1.0 - b)
        slope = k1 * b / avg_len
        for term in terms:
            postings = index.lookup(field, term)
            if not postings:
                continue
            df = len(postings)
            weight = math.log(1.0 + (n_units - df + 0.5) / (df + 0.5)) * (k1 + 1.0)
            for unit_id, tf in postings:
                scores[unit_id] += weight * tf / (tf + base + slope * lens[unit_id])
    else:
        total_terms = index.total_terms(field)
        lam = params.lam
        for term in terms:
            postings = index.lookup(field, term)
            if not postings:
                continue
            ctf = index.ctf(field, term)
            ratio = (1.0 - lam) * total_terms / (lam * ctf)
            for unit_id, tf in postings:
                scores[unit_id] += math.log(1.0 + ratio * tf / lens[unit_id])
    return scores


def passage_boost(s_n: int, P_b: float) -> float:
    """Ranking weight for a passage query: P_b when it cites a section."""
    if s_n < 0:
        raise ValueError(f"s_n must be >= 0, got {s_n}")
    return P_b if s_n >= 1 else 1.0


def rrf_fuse(
    rankings: Sequence[tuple[Sequence[str], float]],
    k_rrf: float = 60.0,
    query_case_id: str = "",
) -> CaseRanking:
    """Fuse per-passage case rankings with boosted Reciprocal Rank Fusion.

    Each ranking is an ordered sequence of case ids (repeats allowed when
    several passages of one case rank; only the best position counts)
    paired with that passage query's boost p_b.
    """
    scores: dict[str, float] = {}
    for ranked_ids, p_b in rankings:
        seen: set[str] = set()
        for position, case_id in enumerate(ranked_ids, start=1):
            if case_id in seen:
                continue
            seen.add(case_id)
            scores[case_id] = scores.get(case_id, 0.0) + p_b / (k_rrf + position)
    scores.pop(query_case_id, None)
    results = sorted(scores.items(), key=lambda item: (-item[1], item[0]))
    return CaseRanking(query_case_id=query_case_id, results=tuple(results))


def _units_to_case_ids(index: InvertedIndex, ranking: Sequence[tuple[int, float]]) -> list[str]:
    return [index.units[unit_id].case_id for unit_id, _ in ranking]


def retrieve_document_level(
    query_case: Case,
    index: InvertedIndex,
    scorer: str = "bm25",
    params: ScorerParams | None = None,
    T: int | None = 200,
    depth: int = 100,
) -> CaseRanking:
    """One whole-case query against a document-level index."""
    if index.granularity != "document":
        raise ValueError("retrieve_document_level needs a document-granularity index")
    terms = extract_query_terms(query_case, index, QueryExtractionParams(T))
    # fetch one extra unit so skipping the query case still fills `depth`
    ranked = search_units(index, terms, scorer=scorer, params=params, depth=depth + 1)
    results = [
        (index.units[unit_id].case_id, score)
        for unit_id, score in ranked
        if index.units[unit_id].case_id != query_case.case_id
    ]
    return CaseRanking(query_case_id=query_case.case_id, results=tuple(results[:depth]))


def retrieve_passage_level(
    query_case: Case,
    index: InvertedIndex,
    annotations: PassageAnnotations | None = None,
    scorer: str = "lm",
    params: ScorerParams | None = None,
    fusion: FusionParams | None = None,
    T: int | None = None,
    case_depth: int = 100,
) -> CaseRanking:
    """Per-passage queries fused to a case ranking, truncated to case_depth."""
    if index.granularity != "passage":
        raise ValueError("retrieve_passage_level needs a passage-granularity index")
    fusion = fusion or FusionParams()
    if annotations is None:
        annotations = index.annotations

    queries = build_passage_queries(query_case, index, annotations, T)
    if not any(q.terms or q.statute_terms for q in queries):
        logger.warning("query case %s produced no usable passage queries", query_case.case_id)
        return CaseRanking(query_case_id=query_case.case_id, results=())

    rankings: list[tuple[list[str], float]] = []
    for pq in queries:
        ranked = search_units(
            index,
            pq.terms,
            pq.statute_terms,
            scorer=scorer,
            params=params,
            s_b=fusion.s_b,
            depth=fusion.per_passage_depth,
        )
        rankings.append((_units_to_case_ids(index, ranked), passage_boost(pq.s_n, fusion.P_b)))
    fused = rrf_fuse(rankings, fusion.k_rrf, query_case_id=query_case.case_id)
    return CaseRanking(query_case_id=fused.query_case_id, results=fused.results[:case_depth])
