"""Deterministic synthetic case collections for tests and demos.

The real competition collection is license-restricted, so tests run on
generated corpora shaped like it: cases grouped into small topical
clusters, each cluster sharing distinctive vocabulary and (with
probability ``statute_density``) a statute-section citation. Relevance
labels pair each query with the other members of its cluster, so relevance
correlates with topical overlap and, at density 1, with shared statute
sections. The same seed always produces a byte-identical collection.
"""

from __future__ import annotations

import random
from pathlib import Path

from .corpus import Collection, make_case
from .statutes import build_catalog

# Raw titles as a catalog file would carry them, junk suffixes included so
# title cleaning has work to do. Acronyms derived from the cleaned titles:
# IRPA, FCA, ITA, CDSA, EIA, FCR, CEA, ...
STATUTE_TITLE_POOL = (
    "Immigration and Refugee Protection Act (S.C. 2001, c. 27)",
    "Federal Courts Act (R.S.C., 1985, c. F-7)",
    "Income Tax Act (R.S.C., 1985, c. 1 (5th Supp.))",
    "Controlled Drugs and Substances Act (S.C. 1996, c. 19)",
    "Employment Insurance Act (S.C. 1996, c. 23)",
    "Federal Courts Rules (SOR/98-106)",
    "Canada Evidence Act (R.S.C., 1985, c. C-5)",
    "Fisheries Act (R.S.C., 1985, c. F-14)",
    "Broadcasting Act (S.C. 1991, c. 11)",
    "Divorce Act (R.S.C., 1985, c. 3 (2nd Supp.))",
    "Patent Rules (SOR/2019-251)",
    "Proceeds of Crime Regulations (SOR/2002-184)",
)

# Boilerplate shared by every case; exercises stopwords and placeholders.
_BOILERPLATE = (
    "the court considered the submissions of the parties",
    "the applicant seeks judicial review of the decision",
    "FRAGMENT_SUPPRESSED the respondent opposes the application",
    "counsel for the applicant relied on REFERENCE_SUPPRESSED",
)

_TOPIC_WORDS_PER_CLUSTER = 6
_CLUSTER_SIZE = 4


def synthetic_statute_titles() -> tuple[str, ...]:
    """Raw statute titles used by the generator, one catalog line each."""
    return STATUTE_TITLE_POOL


def _cluster_ids(n_cases: int) -> list[list[int]]:
    clusters = [
        list(range(start, min(start + _CLUSTER_SIZE, n_cases)))
        for start in range(0, n_cases, _CLUSTER_SIZE)
    ]
    if len(clusters) >= 2 and len(clusters[-1]) == 1:
        clusters[-2].extend(clusters.pop())
    return clusters


def generate_synthetic_collection(
    seed: int,
    n_cases: int,
    vocab_size: int = 80,
    statute_density: float = 0.6,
    *,
    side_topic_pool: int = 60,
    passage_tokens: tuple[int, int] = (10, 16),
    mimic_fraction: float = 0.15,
) -> Collection:
    """Build a labeled collection of ``n_cases`` clustered multi-topic cases.

    Every cluster case argues one primary topic (its cluster's vocabulary,
    spread over two passages, one of which may cite the cluster's statute
    section with probability ``statute_density``) next to three side
    topics from a shared pool and some pure-noise passages. Relevance
    follows the primary topic only: queries are the first half of each
    cluster, their notice cases the remaining members.

    A ``mimic_fraction`` share of cases are non-relevant mimics: each
    clones the token bag of some notice case, swaps a few filler tokens
    for extra primary-topic tokens, and shuffles everything across passage
    boundaries. At whole-document level a mimic outscores the real notice
    it copied; no mimic passage is coherent, so passage-level retrieval
    sees through it. This reproduces the long-document confusability that
    passage retrieval with rank fusion is meant to beat.
    """
    if n_cases < 2:
        raise ValueError(f"n_cases must be >= 2, got {n_cases}")
    if not 0.0 <= statute_density <= 1.0:
        raise ValueError(f"statute_density must be in [0, 1], got {statute_density}")

    rng = random.Random(seed)
    vocab = [f"w{i:04d}" for i in range(vocab_size)]
    side_topics = [
        [f"side{t:03d}x{j}" for j in range(_TOPIC_WORDS_PER_CLUSTER)]
        for t in range(side_topic_pool)
    ]
    catalog = build_catalog(STATUTE_TITLE_POOL)

    n_mimics = int(n_cases * mimic_fraction)
    n_clustered = n_cases - n_mimics
    if n_clustered < 2:
        n_mimics, n_clustered = 0, n_cases
    clusters = _cluster_ids(n_clustered)

    raw_texts: dict[str, str] = {}
    qrels: dict[str, frozenset[str]] = {}
    cluster_topics: list[list[str]] = []
    notice_texts: list[list[str]] = []  # (cluster_no, notice raw_text) pool for mimics
    for cluster_no, members in enumerate(clusters):
        topic_words = [f"topic{cluster_no:04d}x{j}" for j in range(_TOPIC_WORDS_PER_CLUSTER)]
        cluster_topics.append(topic_words)
        sides = [side_topics[(3 * cluster_no + i) % side_topic_pool] for i in range(3)]
        statute = catalog.titles[cluster_no % len(catalog.titles)]
        section = f"{cluster_no + 2}(1)"
        member_ids = [f"case{i:04d}" for i in members]
        n_queries = len(member_ids) // 2

        for position, (case_no, case_id) in enumerate(zip(members, member_ids)):
            passages = []

            for primary_no in range(2):
                tokens = rng.choices(topic_words, k=8) + rng.choices(vocab, k=3)
                rng.shuffle(tokens)
                sentence = " ".join(tokens) + "."
                if primary_no == 0 and rng.random() < statute_density:
                    if statute.acronym and rng.random() < 0.3:
                        cite = f"The panel applied {statute.acronym} s. {section} to the claim."
                    else:
                        cite = (
                            f"Pursuant to section {section} of the "
                            f"{statute.cleaned_title}, relief is sought."
                        )
                    sentence = f"{sentence} {cite}"
                passages.append(sentence)

            for side in sides:
                tokens = rng.choices(side, k=8) + rng.choices(vocab, k=3)
                rng.shuffle(tokens)
                passages.append(" ".join(tokens) + ". " + rng.choice(_BOILERPLATE) + ".")

            for noise_no in range(rng.randint(1, 2)):
                tokens = rng.choices(vocab, k=rng.randint(*passage_tokens))
                tokens += [f"case{case_no:04d}noise{noise_no}"] * 2
                rng.shuffle(tokens)
                passages.append(" ".join(tokens) + ". " + rng.choice(_BOILERPLATE) + ".")

            rng.shuffle(passages)
            raw_texts[case_id] = _join_passages(rng, passages)
            if position >= n_queries:
                notice_texts.append([cluster_no, raw_texts[case_id]])

        for query_id in member_ids[:n_queries]:
            qrels[query_id] = frozenset(m for m in member_ids if m != query_id)

    for mimic_no in range(n_mimics):
        case_id = f"case{n_clustered + mimic_no:04d}"
        cluster_no, source_text = notice_texts[rng.randrange(len(notice_texts))]
        tokens = source_text.split()
        # swap a few filler tokens for extra primary-topic tokens: denser in
        # topic words than a real member at identical length
        filler = [i for i, tok in enumerate(tokens) if tok.startswith("w")]
        for i in rng.sample(filler, min(4, len(filler))):
            tokens[i] = rng.choice(cluster_topics[cluster_no])
        rng.shuffle(tokens)
        n_passages = rng.randint(6, 8)
        bounds = [round(len(tokens) * i / n_passages) for i in range(n_passages + 1)]
        passages = [
            " ".join(tokens[bounds[i] : bounds[i + 1]]) for i in range(n_passages)
        ]
        raw_texts[case_id] = "\n\n".join(p for p in passages if p.strip())

    cases = {
        case_id: make_case(case_id, text, is_query=case_id in qrels)
        for case_id, text in sorted(raw_texts.items())
    }
    return Collection(cases=cases, qrels=qrels)


def _join_passages(rng: random.Random, passages: list[str]) -> str:
    if rng.random() < 0.5:
        return "\n\n".join(passages)
    return "\n".join(f"[{i + 1}] {p}" for i, p in enumerate(passages))


def write_collection_dir(
    collection: Collection,
    out_dir: str | Path,
    titles: tuple[str, ...] | None = STATUTE_TITLE_POOL,
) -> Path:
    """Materialize a collection on disk.

    Case files go to <out_dir>/cases/<case_id>.txt; alongside them sit
    qrels.tsv, queries.txt and, when ``titles`` is given,
    statute_titles.txt.
    """
    out_dir = Path(out_dir)
    cases_dir = out_dir / "cases"
    cases_dir.mkdir(parents=True, exist_ok=True)
    for case_id in sorted(collection.cases):
        (cases_dir / f"{case_id}.txt").write_text(
            collection.cases[case_id].raw_text, encoding="utf-8"
        )
    qrel_lines = [
        f"{query_id}\t{notice_id}"
        for query_id in sorted(collection.qrels)
        for notice_id in sorted(collection.qrels[query_id])
    ]
    (out_dir / "qrels.tsv").write_text(
        "\n".join(qrel_lines) + ("\n" if qrel_lines else ""), encoding="utf-8"
    )
    queries = collection.query_ids()
    (out_dir / "queries.txt").write_text(
        "\n".join(queries) + ("\n" if queries else ""), encoding="utf-8"
    )
    if titles is not None:
        (out_dir / "statute_titles.txt").write_text(
            "\n".join(titles) + "\n", encoding="utf-8"
        )
    return out_dir
