"""Term-weighting functions: BM25, Jelinek-Mercer LM, TF-IDF, compound score.

BM25 and the Jelinek-Mercer language model follow the Lucene formulations
(idf = ln(1 + (N - df + 0.5)/(df + 0.5)); JM in ln(1 + x) form with the
collection model ctf/total_terms), so both scorers are non-negative and a
multi-term query score is the sum of its single-term scores.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class BM25Params:
    k1: float = 1.2
    b: float = 0.75

    def __post_init__(self) -> None:
        if self.k1 < 0:
            raise ValueError(f"k1 must be >= 0, got {self.k1}")
        if not 0.0 <= self.b <= 1.0:
            raise ValueError(f"b must be in [0, 1], got {self.b}")


@dataclass(frozen=True)
class LMParams:
    # default is the passage-level optimum reported for this setup
    lam: float = 0.56

    def __post_init__(self) -> None:
        if not 0.0 < self.lam < 1.0:
            raise ValueError(f"lambda must be in (0, 1), got {self.lam}")


@dataclass(frozen=True)
class FieldScore:
    s_body: float
    s_statute: float
    s_total: float

    @classmethod
    def combine(cls, s_body: float, s_statute: float, s_b: float) -> "FieldScore":
        return cls(s_body, s_statute, compound_score(s_body, s_statute, s_b))


def bm25_term(
    tf: int, df: int, n_units: int, unit_len: int, avg_len: float, params: BM25Params
) -> float:
    """BM25 contribution of one term to one unit; 0 when the term is absent."""
    if tf == 0:
        return 0.0
    if tf < 0 or df < 1 or n_units < 1 or unit_len < 0 or avg_len <= 0:
        raise ValueError(
            f"invalid bm25 statistics: tf={tf} df={df} N={n_units} "
            f"unit_len={unit_len} avg_len={avg_len}"
        )
    idf = math.log(1.0 + (n_units - df + 0.5) / (df + 0.5))
    norm = params.k1 * (1.0 - params.b + params.b * unit_len / avg_len)
    return idf * tf * (params.k1 + 1.0) / (tf + norm)


def lm_jm_term(
    tf: int, unit_len: int, ctf: int, total_terms: int, params: LMParams
) -> float:
    """Jelinek-Mercer contribution of one term; 0 when the term is absent."""
    if tf == 0:
        return 0.0
    if ctf < 1:
        raise RuntimeError(
            f"term has tf={tf} in a unit but collection frequency {ctf}"
        )
    if tf < 0 or unit_len < 1 or total_terms < ctf:
        raise ValueError(
            f"invalid lm statistics: tf={tf} unit_len={unit_len} "
            f"ctf={ctf} total_terms={total_terms}"
        )
    doc_model = (1.0 - params.lam) * tf / unit_len
    coll_model = params.lam * ctf / total_terms
    return math.log(1.0 + doc_model / coll_model)


def tfidf_weight(tf_in_case: int, df: int, n_units: int) -> float:
    """Smoothed tf-idf used to rank a case's own tokens for query extraction."""
    if tf_in_case == 0:
        return 0.0
    if n_units < 1 or tf_in_case < 0 or df < 0:
        raise ValueError(f"invalid tfidf statistics: tf={tf_in_case} df={df} N={n_units}")
    return tf_in_case * math.log((n_units + 1.0) / (df + 1.0))


def compound_score(s_body: float, s_statute: float, s_b: float) -> float:
    """Total unit score: body score plus the weighted statute-field score."""
    return s_body + s_statute * s_b
