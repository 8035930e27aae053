"""Random search over retrieval hyperparameters on the training split.

Trials are independent: trial i draws its parameters from an RNG seeded
with (seed, i), so runs are reproducible, resumable, and order-free. Each
trial executes full retrieval for every training query, computes the
per-rank micro-F1 curve, and keeps the best cutoff.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import Collection
from .evaluation import RankMetrics, metrics_at_ranks, select_cutoff
from .index import InvertedIndex
from .retrieval import (
    FusionParams,
    retrieve_document_level,
    retrieve_passage_level,
)
from .scoring import BM25Params, LMParams
from .statutes import PassageAnnotations

T_CHOICES = (50, 100, 200, 500, None)


@dataclass(frozen=True)
class ParamSpace:
    """Uniform sampling ranges; defaults bracket the useful regions."""

    k1: tuple[float, float] = (0.0, 3.0)
    b: tuple[float, float] = (0.0, 1.0)
    lam: tuple[float, float] = (0.0, 1.0)
    T: tuple[int | None, ...] = T_CHOICES
    P_b: tuple[float, float] = (1.0, 10.0)
    s_b: tuple[float, float] = (0.0, 5.0)


@dataclass(frozen=True)
class TrialResult:
    trial: int
    params: dict
    best_f1: float
    best_k: int
    metrics: tuple[RankMetrics, ...]

    def to_json_dict(self) -> dict:
        return {
            "trial": self.trial,
            "params": self.params,
            "best_f1": self.best_f1,
            "best_k": self.best_k,
            "metrics": [[m.k, m.precision, m.recall, m.f1] for m in self.metrics],
        }


@dataclass
class SearchContext:
    """Everything a trial needs: the index, queries, labels, and run shape."""

    index: InvertedIndex
    collection: Collection
    queries: Sequence[str]
    qrels: dict
    scorer: str = "lm"
    annotations: PassageAnnotations | None = None
    tune_statute: bool = False
    k_rrf: float = 60.0
    per_passage_depth: int = 100
    depth: int = 100
    max_rank: int = 100


def sample_params(space: ParamSpace, rng: random.Random, scorer: str, tune_statute: bool) -> dict:
    """Draw one parameter set; sampling order is fixed for reproducibility."""
    params: dict = {}
    if scorer == "bm25":
        params["k1"] = rng.uniform(*space.k1)
        params["b"] = rng.uniform(*space.b)
    else:
        low, high = space.lam
        # lambda lives in the open interval; nudge away from the endpoints
        params["lambda"] = min(max(rng.uniform(low, high), 1e-9), 1.0 - 1e-9)
    params["T"] = rng.choice(space.T)
    if tune_statute:
        params["P_b"] = rng.uniform(*space.P_b)
        params["s_b"] = rng.uniform(*space.s_b)
    else:
        params["P_b"] = 1.0
        params["s_b"] = 0.0
    return params


def evaluate_params(params: dict, context: SearchContext) -> tuple[float, int, list[RankMetrics]]:
    """Run retrieval with one parameter set over the context queries."""
    if context.scorer == "bm25":
        scorer_params = BM25Params(k1=params["k1"], b=params["b"])
    else:
        scorer_params = LMParams(lam=params["lambda"])
    runs = {}
    for query_id in context.queries:
        case = context.collection.cases[query_id]
        if context.index.granularity == "document":
            runs[query_id] = retrieve_document_level(
                case,
                context.index,
                scorer=context.scorer,
                params=scorer_params,
                T=params["T"],
                depth=context.depth,
            )
        else:
            fusion = FusionParams(
                k_rrf=context.k_rrf,
                P_b=params["P_b"],
                s_b=params["s_b"],
                per_passage_depth=context.per_passage_depth,
            )
            runs[query_id] = retrieve_passage_level(
                case,
                context.index,
                annotations=context.annotations,
                scorer=context.scorer,
                params=scorer_params,
                fusion=fusion,
                T=params["T"],
                case_depth=context.depth,
            )
    metrics = metrics_at_ranks(runs, context.qrels, context.max_rank)
    best_k = select_cutoff(metrics)
    best_f1 = metrics[best_k - 1].f1
    return best_f1, best_k, metrics


def run_random_search(
    space: ParamSpace,
    n_trials: int,
    seed: int,
    context: SearchContext,
    skip_trials: Iterable[int] = (),
) -> list[TrialResult]:
    """Evaluate n_trials independent samples, best F1 first.

    ``skip_trials`` supports resuming: listed trial indexes are not
    re-evaluated (their parameters would be identical anyway).
    """
    if n_trials < 1:
        raise ValueError(f"n_trials must be >= 1, got {n_trials}")
    skip = set(skip_trials)
    results = []
    for trial in range(n_trials):
        if trial in skip:
            continue
        rng = random.Random(f"{seed}:{trial}")
        params = sample_params(space, rng, context.scorer, context.tune_statute)
        best_f1, best_k, metrics = evaluate_params(params, context)
        results.append(
            TrialResult(
                trial=trial,
                params=params,
                best_f1=best_f1,
                best_k=best_k,
                metrics=tuple(metrics),
            )
        )
    results.sort(key=lambda r: (-r.best_f1, r.trial))
    return results


def write_trials_log(results: Sequence[TrialResult], path: str | Path, append: bool = False) -> None:
    """JSON-lines trial log, one TrialResult per line, in execution order."""
    mode = "a" if append else "w"
    with open(path, mode, encoding="utf-8") as fh:
        for result in sorted(results, key=lambda r: r.trial):
            fh.write(json.dumps(result.to_json_dict(), sort_keys=True) + "\n")


def read_logged_trials(path: str | Path) -> set[int]:
    """Trial indexes already present in a JSON-lines log."""
    done = set()
    log = Path(path)
    if not log.exists():
        return done
    for line in log.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line:
            done.add(int(json.loads(line)["trial"]))
    return done
