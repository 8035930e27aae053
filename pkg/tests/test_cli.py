"""End-to-end CLI tests driving main() in process."""

import json

import pytest

from lexcourt import synthetic
from lexcourt.cli import load_config_file, main, read_run_file, write_run_file
from lexcourt.errors import ValidationError
from lexcourt.retrieval import CaseRanking


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    out = tmp_path_factory.mktemp("synth")
    coll = synthetic.generate_synthetic_collection(7, 60, statute_density=1.0)
    synthetic.write_collection_dir(coll, out)
    return out


def run_cli(*argv):
    return main([str(a) for a in argv])


class TestStats:
    def test_json_shape(self, corpus, capsys):
        assert run_cli("stats", corpus / "cases", "--qrels", corpus / "qrels.tsv") == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["total_cases"] == 60
        assert payload["query_cases"] == 25
        assert payload["max_tokens"] >= payload["median_tokens"]
        assert payload["max_notices"] >= payload["mean_notices"]

    def test_unlabeled_notice_stats_null(self, corpus, capsys):
        assert run_cli("stats", corpus / "cases") == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["max_notices"] is None

    def test_missing_dir_exits_2(self, tmp_path, capsys):
        assert run_cli("stats", tmp_path / "nope") == 2
        assert "error" in capsys.readouterr().err

    def test_empty_dir_exits_2(self, tmp_path, capsys):
        (tmp_path / "empty").mkdir()
        assert run_cli("stats", tmp_path / "empty") == 2


class TestIndexCommand:
    def test_build_passage_index(self, corpus, tmp_path, capsys):
        out = tmp_path / "p.idx"
        code = run_cli(
            "index", corpus / "cases", "-o", out,
            "--titles", corpus / "statute_titles.txt", "--granularity", "passage",
        )
        assert code == 0
        from lexcourt.index import load_index

        idx = load_index(out)
        assert idx.granularity == "passage"
        assert idx.total_terms("statute") > 0  # titles enabled the statute field
        assert idx.annotations is not None

    def test_build_document_index(self, corpus, tmp_path):
        out = tmp_path / "d.idx"
        assert run_cli("index", corpus / "cases", "-o", out, "--granularity", "document") == 0
        from lexcourt.index import load_index

        assert load_index(out).granularity == "document"
        assert load_index(out).n_units == 60

    def test_missing_corpus_exits_2(self, tmp_path):
        assert run_cli("index", tmp_path / "missing", "-o", tmp_path / "x.idx") == 2


@pytest.fixture(scope="module")
def passage_index(corpus, tmp_path_factory):
    out = tmp_path_factory.mktemp("idx") / "p.idx"
    assert run_cli(
        "index", corpus / "cases", "-o", out, "--titles", corpus / "statute_titles.txt"
    ) == 0
    return out


class TestSearchCommand:
    def test_run_file_format(self, corpus, passage_index, tmp_path):
        run_path = tmp_path / "run.txt"
        code = run_cli(
            "search", passage_index, corpus / "cases",
            "--queries", corpus / "queries.txt", "-o", run_path, "--tag", "demo",
        )
        assert code == 0
        by_query: dict[str, list[tuple[int, float]]] = {}
        for line in run_path.read_text().splitlines():
            cols = line.split()
            assert len(cols) == 6
            qid, q0, _cid, rank, score, tag = cols
            assert q0 == "Q0" and tag == "demo"
            by_query.setdefault(qid, []).append((int(rank), float(score)))
        for rows in by_query.values():
            ranks = [r for r, _ in rows]
            scores = [s for _, s in rows]
            assert ranks == list(range(1, len(rows) + 1))
            assert scores == sorted(scores, reverse=True)

    def test_unknown_query_id_exits_2(self, corpus, passage_index, tmp_path):
        bad = tmp_path / "queries.txt"
        bad.write_text("caseZZZZ\n", encoding="utf-8")
        assert run_cli(
            "search", passage_index, corpus / "cases",
            "--queries", bad, "-o", tmp_path / "r.txt",
        ) == 2

    def test_corrupt_index_exits_2(self, corpus, tmp_path):
        broken = tmp_path / "broken.idx"
        broken.write_bytes(b"garbage")
        assert run_cli(
            "search", broken, corpus / "cases",
            "--queries", corpus / "queries.txt", "-o", tmp_path / "r.txt",
        ) == 2

    def test_config_file_with_flag_override(self, corpus, passage_index, tmp_path):
        config = tmp_path / "run.cfg"
        config.write_text("scorer=bm25\nk1=0.5\nb=0.1\ndepth=7\n", encoding="utf-8")
        run_a = tmp_path / "a.txt"
        run_b = tmp_path / "b.txt"
        assert run_cli(
            "search", passage_index, corpus / "cases", "--queries", corpus / "queries.txt",
            "-o", run_a, "--config", config,
        ) == 0
        # flag overrides the config depth
        assert run_cli(
            "search", passage_index, corpus / "cases", "--queries", corpus / "queries.txt",
            "-o", run_b, "--config", config, "--depth", "3",
        ) == 0
        runs_a = read_run_file(run_a)
        runs_b = read_run_file(run_b)
        assert max(len(r) for r in runs_a.values()) == 7
        assert max(len(r) for r in runs_b.values()) == 3

    def test_unknown_config_key_exits_2(self, corpus, passage_index, tmp_path):
        config = tmp_path / "bad.cfg"
        config.write_text("warp_speed=9\n", encoding="utf-8")
        assert run_cli(
            "search", passage_index, corpus / "cases", "--queries", corpus / "queries.txt",
            "-o", tmp_path / "r.txt", "--config", config,
        ) == 2


class TestEvalCommand:
    def test_round_trips_in_process_metrics(self, corpus, passage_index, tmp_path, capsys):
        run_path = tmp_path / "run.txt"
        assert run_cli(
            "search", passage_index, corpus / "cases",
            "--queries", corpus / "queries.txt", "-o", run_path,
        ) == 0
        capsys.readouterr()
        metrics_path = tmp_path / "metrics.tsv"
        assert run_cli(
            "eval", run_path, corpus / "qrels.tsv", "-o", metrics_path, "--max-rank", "30"
        ) == 0
        summary = json.loads(capsys.readouterr().out.strip().splitlines()[-1])

        from lexcourt import evaluation
        from lexcourt.corpus import load_qrels

        runs = read_run_file(run_path)
        metrics = evaluation.metrics_at_ranks(runs, load_qrels(corpus / "qrels.tsv"), 30)
        best_k = evaluation.select_cutoff(metrics)
        best = metrics[best_k - 1]
        assert summary["best_k"] == best_k
        assert summary["f1"] == pytest.approx(best.f1, abs=1e-12)

        rows = metrics_path.read_text().splitlines()
        assert len(rows) == 30
        k, precision, recall, f1 = rows[best_k - 1].split("\t")
        assert int(k) == best_k
        assert float(f1) == pytest.approx(best.f1, abs=1e-6)

    def test_unknown_query_exits_2(self, corpus, tmp_path):
        run_path = tmp_path / "bad_run.txt"
        run_path.write_text("caseZZZZ Q0 case0001 1 1.0 tag\n", encoding="utf-8")
        assert run_cli("eval", run_path, corpus / "qrels.tsv") == 2


class TestSubmitCommand:
    def make_run(self, tmp_path):
        runs = {
            "q1": CaseRanking("q1", tuple((f"c{i}", 10.0 - i) for i in range(10))),
            "q2": CaseRanking("q2", tuple((f"d{i}", 5.0 - i) for i in range(3))),
        }
        path = tmp_path / "run.txt"
        write_run_file(runs, path, "tag")
        return path

    def test_cutoff_truncates(self, tmp_path):
        run_path = self.make_run(tmp_path)
        out = tmp_path / "sub.tsv"
        assert run_cli("submit", run_path, "--cutoff", "7", "-o", out) == 0
        lines = out.read_text().splitlines()
        assert len([l for l in lines if l.startswith("q1\t")]) == 7
        assert len([l for l in lines if l.startswith("q2\t")]) == 3  # shorter than cutoff
        assert all(len(line.split("\t")) == 2 for line in lines)

    def test_empty_run_warns_and_succeeds(self, tmp_path, capsys):
        empty = tmp_path / "empty.txt"
        empty.write_text("", encoding="utf-8")
        out = tmp_path / "sub.tsv"
        assert run_cli("submit", empty, "--cutoff", "5", "-o", out) == 0
        assert "warning" in capsys.readouterr().err
        assert out.read_text() == ""


class TestTuneCommand:
    def test_tune_and_reuse_best_config(self, corpus, passage_index, tmp_path, capsys):
        log = tmp_path / "trials.jsonl"
        best = tmp_path / "best.cfg"
        code = run_cli(
            "tune", passage_index, corpus / "cases", corpus / "qrels.tsv",
            "--trials", "2", "--seed", "1", "--train-count", "20",
            "--log", log, "--best-out", best, "--max-rank", "20", "--tune-statute",
        )
        assert code == 0
        summary = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        assert summary["train_queries"] == 20
        assert summary["dev_queries"] > 0
        assert log.exists()
        assert len(log.read_text().splitlines()) == 2

        config = load_config_file(best)
        assert config["scorer"] == "lm"
        assert "lambda" in config and "s_b" in config and "P_b" in config
        run_path = tmp_path / "best_run.txt"
        assert run_cli(
            "search", passage_index, corpus / "cases", "--queries", corpus / "queries.txt",
            "-o", run_path, "--config", best,
        ) == 0
        assert run_path.read_text()

    def test_tune_deterministic(self, corpus, passage_index, tmp_path, capsys):
        logs = []
        for name in ("a", "b"):
            log = tmp_path / f"{name}.jsonl"
            assert run_cli(
                "tune", passage_index, corpus / "cases", corpus / "qrels.tsv",
                "--trials", "2", "--seed", "5", "--train-count", "10", "--log", log,
                "--max-rank", "10",
            ) == 0
            logs.append(log.read_bytes())
        capsys.readouterr()
        assert logs[0] == logs[1]

    def test_bad_train_count_exits_2(self, corpus, passage_index, tmp_path):
        assert run_cli(
            "tune", passage_index, corpus / "cases", corpus / "qrels.tsv",
            "--trials", "1", "--train-count", "999", "--log", tmp_path / "t.jsonl",
        ) == 2


class TestSynthCommand:
    def test_writes_layout(self, tmp_path):
        out = tmp_path / "demo"
        assert run_cli("synth", out, "--seed", "3", "--cases", "20") == 0
        assert (out / "cases").is_dir()
        assert len(list((out / "cases").glob("*.txt"))) == 20
        assert (out / "qrels.tsv").exists()
        assert (out / "queries.txt").exists()
        assert (out / "statute_titles.txt").exists()


def test_parse_run_file_round_trip(tmp_path):
    runs = {"q": CaseRanking("q", (("a", 2.5), ("b", 1.25)))}
    path = tmp_path / "run.txt"
    write_run_file(runs, path, "t")
    parsed = read_run_file(path)
    assert parsed["q"].case_ids() == ["a", "b"]


def test_read_run_file_rejects_malformed(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("q Q0 a one 1.0 tag\n", encoding="utf-8")
    with pytest.raises(ValidationError):
        read_run_file(path)
    path.write_text("q Q0 a 1 1.0\n", encoding="utf-8")
    with pytest.raises(ValidationError):
        read_run_file(path)
