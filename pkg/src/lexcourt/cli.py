"""Command-line interface: stats, index, search, eval, tune, submit, synth.

Hyperparameters can come from flags or from a flat key=value config file
(flags win). Run files use the 6-column TREC format; submissions are
"query_id<TAB>case_id" rows truncated at the chosen cutoff. Exit codes:
0 success, 2 validation/input error, 1 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import corpus as corpus_mod
from . import evaluation, index as index_mod, retrieval, statutes, synthetic, tuner
from .errors import IndexFormatError, ValidationError
from .retrieval import CaseRanking, FusionParams
from .scoring import BM25Params, LMParams
from .textproc import DEFAULT_PLACEHOLDERS, DEFAULT_STOPWORDS, PipelineConfig, load_token_file

CONFIG_KEYS = {
    "scorer",
    "k1",
    "b",
    "lambda",
    "T",
    "k_rrf",
    "P_b",
    "s_b",
    "depth",
    "granularity",
    "stopwords_path",
    "placeholders_path",
}


def load_config_file(path: str | Path) -> dict[str, str]:
    config = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        entry = line.split("#", 1)[0].strip()
        if not entry:
            continue
        if "=" not in entry:
            raise ValidationError(f"{path}:{lineno}: expected key=value")
        key, value = entry.split("=", 1)
        key = key.strip()
        if key not in CONFIG_KEYS:
            raise ValidationError(f"{path}:{lineno}: unknown config key {key!r}")
        config[key] = value.strip()
    return config


def _parse_T(value: str) -> int | None:
    if value.lower() in ("none", ""):
        return None
    return int(value)


def _resolve(flag_value, config: dict[str, str], key: str, default, cast):
    if flag_value is not None:
        return flag_value
    if key in config:
        return cast(config[key])
    return default


def _pipeline_from(args, config: dict[str, str]) -> PipelineConfig:
    stopwords_path = _resolve(args.stopwords, config, "stopwords_path", None, str)
    placeholders_path = _resolve(args.placeholders, config, "placeholders_path", None, str)
    return PipelineConfig(
        stopwords=load_token_file(stopwords_path) if stopwords_path else DEFAULT_STOPWORDS,
        placeholders=(
            load_token_file(placeholders_path) if placeholders_path else DEFAULT_PLACEHOLDERS
        ),
    )


def write_run_file(runs: dict[str, CaseRanking], path: str | Path, tag: str) -> None:
    lines = []
    for query_id, ranking in runs.items():
        for rank, (case_id, score) in enumerate(ranking.results, 1):
            lines.append(f"{query_id} Q0 {case_id} {rank} {score:.6f} {tag}")
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def read_run_file(path: str | Path) -> dict[str, CaseRanking]:
    rows: dict[str, list[tuple[int, str, float]]] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 6:
            raise ValidationError(f"{path}:{lineno}: expected 6 whitespace-separated columns")
        query_id, _, case_id, rank, score, _ = parts
        try:
            rows.setdefault(query_id, []).append((int(rank), case_id, float(score)))
        except ValueError as exc:
            raise ValidationError(f"{path}:{lineno}: {exc}") from exc
    runs = {}
    for query_id, entries in rows.items():
        entries.sort()
        runs[query_id] = CaseRanking(
            query_case_id=query_id,
            results=tuple((case_id, score) for _, case_id, score in entries),
        )
    return runs


def _scorer_params(scorer: str, args, config: dict[str, str]):
    if scorer == "bm25":
        return BM25Params(
            k1=_resolve(args.k1, config, "k1", 1.2, float),
            b=_resolve(args.b, config, "b", 0.75, float),
        )
    return LMParams(lam=_resolve(args.lam, config, "lambda", 0.56, float))


def cmd_stats(args) -> int:
    collection = corpus_mod.load_collection(args.corpus_dir, args.qrels)
    stats = corpus_mod.collection_stats(collection)
    payload = json.dumps(stats.to_json_dict(), indent=2, sort_keys=True)
    if args.output:
        Path(args.output).write_text(payload + "\n", encoding="utf-8")
    else:
        print(payload)
    return 0


def cmd_index(args) -> int:
    config = load_config_file(args.config) if args.config else {}
    pipeline = _pipeline_from(args, config)
    granularity = _resolve(args.granularity, config, "granularity", "passage", str)
    collection = corpus_mod.load_collection(args.corpus_dir)
    annotations = None
    if args.titles:
        catalog = statutes.load_statute_titles(args.titles)
        annotations = statutes.annotate_collection(collection, catalog)
    built = index_mod.build_index(collection, annotations, granularity, pipeline)
    index_mod.save_index(built, args.output)
    print(
        f"indexed {built.n_units} {granularity} units "
        f"({built.total_terms('body')} body terms, "
        f"{built.total_terms('statute')} statute terms) -> {args.output}"
    )
    return 0


def cmd_search(args) -> int:
    config = load_config_file(args.config) if args.config else {}
    idx = index_mod.load_index(args.index)
    collection = corpus_mod.load_collection(args.corpus_dir, None, args.queries)
    query_ids = list(dict.fromkeys(corpus_mod.load_id_list(args.queries)))

    scorer = _resolve(args.scorer, config, "scorer", "lm", str)
    if scorer not in retrieval.SCORERS:
        raise ValidationError(f"unknown scorer {scorer!r}")
    params = _scorer_params(scorer, args, config)
    T = _resolve(args.T, config, "T", None, _parse_T)
    depth = _resolve(args.depth, config, "depth", 100, int)
    fusion = FusionParams(
        k_rrf=_resolve(args.krrf, config, "k_rrf", 60.0, float),
        P_b=_resolve(args.Pb, config, "P_b", 1.0, float),
        s_b=_resolve(args.sb, config, "s_b", 0.0, float),
        per_passage_depth=depth,
    )

    runs = {}
    for query_id in query_ids:
        case = collection.cases[query_id]
        if idx.granularity == "document":
            runs[query_id] = retrieval.retrieve_document_level(
                case, idx, scorer=scorer, params=params, T=T, depth=depth
            )
        else:
            runs[query_id] = retrieval.retrieve_passage_level(
                case, idx, scorer=scorer, params=params, fusion=fusion, T=T, case_depth=depth
            )
    write_run_file(runs, args.output, args.tag)
    print(f"wrote {sum(len(r) for r in runs.values())} rows for {len(runs)} queries -> {args.output}")
    return 0


def cmd_eval(args) -> int:
    runs = read_run_file(args.run)
    qrels = corpus_mod.load_qrels(args.qrels)
    metrics = evaluation.metrics_at_ranks(runs, qrels, args.max_rank)
    best_k = evaluation.select_cutoff(metrics)
    best = metrics[best_k - 1]
    table = "\n".join(
        f"{m.k}\t{m.precision:.6f}\t{m.recall:.6f}\t{m.f1:.6f}" for m in metrics
    )
    summary = json.dumps(
        {
            "best_k": best_k,
            "precision": best.precision,
            "recall": best.recall,
            "f1": best.f1,
        },
        sort_keys=True,
    )
    if args.output:
        Path(args.output).write_text(table + "\n", encoding="utf-8")
    else:
        print(table)
    print(summary)
    return 0


def _best_config_lines(params: dict, scorer: str, best_k: int, depth: int) -> list[str]:
    lines = [f"# selected by random search; best cutoff k={best_k}", f"scorer={scorer}"]
    if scorer == "bm25":
        lines += [f"k1={params['k1']}", f"b={params['b']}"]
    else:
        lines.append(f"lambda={params['lambda']}")
    lines += [
        f"T={'none' if params['T'] is None else params['T']}",
        f"P_b={params['P_b']}",
        f"s_b={params['s_b']}",
        f"depth={depth}",
    ]
    return lines


def cmd_tune(args) -> int:
    idx = index_mod.load_index(args.index)
    collection = corpus_mod.load_collection(args.corpus_dir, args.qrels)
    if args.query_order:
        queries = corpus_mod.load_id_list(args.query_order)
        unknown = sorted(set(queries) - set(collection.qrels))
        if unknown:
            raise ValidationError(f"query-order ids without labels: {', '.join(unknown)}")
    else:
        queries = sorted(collection.qrels)
    train, dev = evaluation.split_train_dev(queries, evaluation.SplitConfig(args.train_count))

    context = tuner.SearchContext(
        index=idx,
        collection=collection,
        queries=train,
        qrels=collection.qrels,
        scorer=args.scorer,
        annotations=idx.annotations,
        tune_statute=args.tune_statute,
        depth=args.depth,
        per_passage_depth=args.depth,
        max_rank=args.max_rank,
    )
    skip = tuner.read_logged_trials(args.resume) if args.resume else set()
    results = tuner.run_random_search(tuner.ParamSpace(), args.trials, args.seed, context, skip)
    log_path = args.log or (args.resume or "trials.jsonl")
    tuner.write_trials_log(results, log_path, append=bool(args.resume))

    # pick the overall best across this run and anything resumed
    all_lines = [
        json.loads(line)
        for line in Path(log_path).read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]
    best = min(all_lines, key=lambda r: (-r["best_f1"], r["trial"]))
    best_params = dict(best["params"])

    dev_context = tuner.SearchContext(
        index=context.index,
        collection=context.collection,
        queries=dev,
        qrels=context.qrels,
        scorer=context.scorer,
        annotations=context.annotations,
        tune_statute=context.tune_statute,
        depth=context.depth,
        per_passage_depth=context.per_passage_depth,
        max_rank=context.max_rank,
    )
    _, _, dev_metrics = tuner.evaluate_params(best_params, dev_context)
    dev_at_k = dev_metrics[best["best_k"] - 1]

    if args.best_out:
        lines = _best_config_lines(best_params, args.scorer, best["best_k"], args.depth)
        Path(args.best_out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(
        json.dumps(
            {
                "trials": len(all_lines),
                "best_trial": best["trial"],
                "params": best_params,
                "train_f1": best["best_f1"],
                "best_k": best["best_k"],
                "train_queries": len(train),
                "dev_queries": len(dev),
                "dev_precision": dev_at_k.precision,
                "dev_recall": dev_at_k.recall,
                "dev_f1": dev_at_k.f1,
            },
            sort_keys=True,
        )
    )
    return 0


def cmd_submit(args) -> int:
    runs = read_run_file(args.run)
    if not runs:
        print("warning: empty run file, writing empty submission", file=sys.stderr)
    lines = []
    for query_id in runs:
        for case_id, _ in runs[query_id].results[: args.cutoff]:
            lines.append(f"{query_id}\t{case_id}")
    Path(args.output).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
    return 0


def cmd_synth(args) -> int:
    collection = synthetic.generate_synthetic_collection(
        args.seed, args.cases, args.vocab_size, args.statute_density
    )
    synthetic.write_collection_dir(collection, args.out_dir)
    print(
        f"wrote {len(collection)} cases ({len(collection.qrels)} queries) to {args.out_dir}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lexcourt", description="Lexical precedent-case retrieval toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="collection statistics as JSON")
    p.add_argument("corpus_dir")
    p.add_argument("--qrels")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("index", help="build an inverted index")
    p.add_argument("corpus_dir")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--titles", help="statute titles file enabling the statute field")
    p.add_argument("--granularity", choices=index_mod.GRANULARITIES)
    p.add_argument("--config")
    p.add_argument("--stopwords")
    p.add_argument("--placeholders")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("search", help="run retrieval, write a TREC run file")
    p.add_argument("index")
    p.add_argument("corpus_dir")
    p.add_argument("--queries", required=True, help="file with one query case id per line")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--scorer", choices=retrieval.SCORERS)
    p.add_argument("--k1", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--T", type=_parse_T)
    p.add_argument("--Pb", type=float)
    p.add_argument("--sb", type=float)
    p.add_argument("--krrf", type=float)
    p.add_argument("--depth", type=int)
    p.add_argument("--tag", default="lexcourt")
    p.add_argument("--config")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("eval", help="metrics per rank cutoff for a run file")
    p.add_argument("run")
    p.add_argument("qrels")
    p.add_argument("--max-rank", type=int, default=100)
    p.add_argument("-o", "--output", help="metrics TSV path (default stdout)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("tune", help="random search on the training split")
    p.add_argument("index")
    p.add_argument("corpus_dir")
    p.add_argument("qrels")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--train-count", type=int, default=700)
    p.add_argument("--scorer", choices=retrieval.SCORERS, default="lm")
    p.add_argument("--tune-statute", action="store_true", help="also sample P_b and s_b")
    p.add_argument("--depth", type=int, default=100)
    p.add_argument("--max-rank", type=int, default=100)
    p.add_argument("--query-order", help="file fixing the query order for the split")
    p.add_argument("--log", help="trials JSONL path (default trials.jsonl)")
    p.add_argument("--resume", help="existing trials JSONL; logged trials are skipped")
    p.add_argument("--best-out", help="write the best configuration as key=value")
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("submit", help="competition-format file from a run file")
    p.add_argument("run")
    p.add_argument("--cutoff", type=int, required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_submit)

    p = sub.add_parser("synth", help="generate a synthetic test collection")
    p.add_argument("out_dir")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cases", type=int, default=50)
    p.add_argument("--vocab-size", type=int, default=400)
    p.add_argument("--statute-density", type=float, default=0.6)
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, IndexFormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - unexpected internal failure
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
