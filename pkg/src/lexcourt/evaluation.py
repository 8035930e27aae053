"""Micro-averaged precision/recall/F1 over rank cutoffs and the query split.

Metrics pool true positives globally: at each cutoff k, precision divides
by the number of results actually retrieved (min(k, ranking length)) so
short rankings are not penalized for unfilled slots, and recall divides by
the total number of relevant cases.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence, Set

from .errors import ValidationError
from .retrieval import CaseRanking


@dataclass(frozen=True)
class RankMetrics:
    k: int
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class SplitConfig:
    train_count: int = 700


def f1_score(precision: float, recall: float) -> float:
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def metrics_at_ranks(
    runs: Mapping[str, CaseRanking],
    qrels: Mapping[str, Set[str]],
    max_rank: int = 100,
) -> list[RankMetrics]:
    """Micro-averaged metrics for every cutoff k in 1..max_rank."""
    if max_rank < 1:
        raise ValueError(f"max_rank must be >= 1, got {max_rank}")
    missing = sorted(q for q in runs if q not in qrels)
    if missing:
        raise ValidationError(f"queries without relevance labels: {', '.join(missing)}")

    queries = sorted(runs)
    total_relevant = sum(len(qrels[q]) for q in queries)
    # cumulative hit counts per query, then pooled per cutoff
    cum_hits: list[list[int]] = []
    lengths: list[int] = []
    for q in queries:
        relevant = qrels[q]
        ranking = runs[q].case_ids()[:max_rank]
        hits = []
        count = 0
        for case_id in ranking:
            count += case_id in relevant
            hits.append(count)
        cum_hits.append(hits)
        lengths.append(len(ranking))

    metrics = []
    for k in range(1, max_rank + 1):
        tp = sum(hits[min(k, n) - 1] if n else 0 for hits, n in zip(cum_hits, lengths))
        retrieved = sum(min(k, n) for n in lengths)
        precision = tp / retrieved if retrieved else 0.0
        recall = tp / total_relevant if total_relevant else 0.0
        metrics.append(RankMetrics(k, precision, recall, f1_score(precision, recall)))
    return metrics


def select_cutoff(metrics: Sequence[RankMetrics]) -> int:
    """Cutoff with the highest F1; ties go to the smallest k."""
    if not metrics:
        raise ValueError("no metrics to select a cutoff from")
    return min(metrics, key=lambda m: (-m.f1, m.k)).k


def split_train_dev(
    queries: Sequence[str], config: SplitConfig | None = None
) -> tuple[list[str], list[str]]:
    """First train_count queries train, the rest are the dev set."""
    config = config or SplitConfig()
    if not 1 <= config.train_count < len(queries):
        raise ValueError(
            f"train_count must be in [1, {len(queries) - 1}], got {config.train_count}"
        )
    return list(queries[: config.train_count]), list(queries[config.train_count :])
