"""End-to-end tests of the command line interface."""

import csv
import subprocess
import sys

import pytest

from weaveprint.cli import main


def run_cli(*args):
    return main([str(a) for a in args])


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


@pytest.fixture(scope="module")
def corpus_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("cli") / "corpus"
    code = run_cli(
        "generate", "--families", "plain,twill-2-2", "--samples", 3,
        "--rows", 10, "--cols", 10, "--seed", 11, "--out", out,
    )
    assert code == 0
    return out


def test_generate_writes_manifest_and_graphs(corpus_dir):
    rows = read_csv(corpus_dir / "manifest.csv")
    assert rows[0] == ["path", "label"]
    assert len(rows) == 1 + 6
    for path, label in rows[1:]:
        assert (corpus_dir / path).is_file()
        assert label in ("plain", "twill-2-2")


def test_generate_is_deterministic(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    for out in (a, b):
        assert run_cli("generate", "--families", "plain", "--samples", 2,
                       "--rows", 8, "--cols", 8, "--seed", 4, "--out", out) == 0
    assert (a / "manifest.csv").read_bytes() == (b / "manifest.csv").read_bytes()
    name = read_csv(a / "manifest.csv")[1][0]
    assert (a / name).read_bytes() == (b / name).read_bytes()


def test_fingerprint_csv_counts_sum_to_crossings(corpus_dir, tmp_path):
    out = tmp_path / "fps.csv"
    assert run_cli("fingerprint", "--k", 2, "--in", corpus_dir, "--out", out) == 0
    rows = read_csv(out)
    assert rows[0] == ["graph_id", "neighbourhood_code", "count"]
    per_graph = {}
    for graph_id, code, count in rows[1:]:
        assert code.startswith("[") and code.endswith("]")
        per_graph[graph_id] = per_graph.get(graph_id, 0) + int(count)
    from weaveprint import load_corpus

    corpus = load_corpus(str(corpus_dir / "manifest.csv"))
    assert per_graph == {
        item: g.crossing_count for item, g in corpus.graphs.items()
    }


def test_fingerprint_single_file(corpus_dir, tmp_path):
    name = read_csv(corpus_dir / "manifest.csv")[1][0]
    out = tmp_path / "one.csv"
    assert run_cli("fingerprint", "--k", 1, "--in", corpus_dir / name, "--out", out) == 0
    rows = read_csv(out)
    assert {r[0] for r in rows[1:]} == {name[: -len(".tg1")]}


def test_query_all_ranks_everyone_else(corpus_dir, tmp_path):
    out = tmp_path / "q.csv"
    assert run_cli("query", "--k", 2, "--measure", "jaccard",
                   "--corpus", corpus_dir, "--query", "all", "--out", out) == 0
    rows = read_csv(out)[1:]
    queries = {}
    for qid, pos, item, dist in rows:
        assert item != qid
        queries.setdefault(qid, []).append((int(pos), float(dist)))
    assert len(queries) == 6
    for ranked in queries.values():
        assert [p for p, _ in ranked] == list(range(1, 6))
        dists = [d for _, d in ranked]
        assert dists == sorted(dists)


def test_query_external_file_includes_whole_corpus(corpus_dir, tmp_path):
    name = read_csv(corpus_dir / "manifest.csv")[1][0]
    out = tmp_path / "qx.csv"
    assert run_cli("query", "--k", 2, "--measure", "euclid", "--corpus", corpus_dir,
                   "--query", corpus_dir / name, "--out", out) == 0
    rows = read_csv(out)[1:]
    assert len(rows) == 6
    assert float(rows[0][3]) == 0.0  # the file is itself a corpus member


def test_jobs_flag_does_not_change_output(corpus_dir, tmp_path):
    a = tmp_path / "j1.csv"
    b = tmp_path / "j2.csv"
    for out, jobs in ((a, 1), (b, 2)):
        assert run_cli("query", "--k", 2, "--measure", "cos-tfidf",
                       "--corpus", corpus_dir, "--query", "all",
                       "--jobs", jobs, "--out", out) == 0
    assert a.read_bytes() == b.read_bytes()


def test_evaluate_retrieval_tables_and_figures(corpus_dir, tmp_path):
    out = tmp_path / "ret.csv"
    assert run_cli("evaluate-retrieval", "--k", 2, "--measure", "jaccard",
                   "--corpus", corpus_dir, "--out", out) == 0
    table = read_csv(out)
    assert table[0] == ["recall_level", "precision", "f_measure"]
    assert len(table) == 12
    assert [r[0] for r in table[1:]] == [f"{l/10:.1f}" for l in range(11)]
    summary = dict(read_csv(tmp_path / "ret_summary.csv")[1:])
    assert 0.0 <= float(summary["map"]) <= 1.0
    assert (tmp_path / "ret_pr.png").stat().st_size > 0
    assert (tmp_path / "ret_fr.png").stat().st_size > 0


def test_no_figures_flag(corpus_dir, tmp_path):
    out = tmp_path / "ret.csv"
    assert run_cli("evaluate-retrieval", "--k", 2, "--measure", "jaccard",
                   "--corpus", corpus_dir, "--no-figures", "--out", out) == 0
    assert not (tmp_path / "ret_pr.png").exists()


def test_evaluate_retrieval_rerun_is_byte_identical(corpus_dir, tmp_path):
    a = tmp_path / "r1.csv"
    b = tmp_path / "r2.csv"
    for out in (a, b):
        assert run_cli("evaluate-retrieval", "--k", 2, "--measure", "overlap",
                       "--corpus", corpus_dir, "--no-figures", "--out", out) == 0
    assert a.read_bytes() == b.read_bytes()


def test_cluster_and_evaluate_round_trip(corpus_dir, tmp_path):
    asg = tmp_path / "asg.csv"
    assert run_cli("cluster", "--algo", "hac", "--k", 2, "--measure", "jaccard",
                   "--criterion", "complete", "--m", 2,
                   "--corpus", corpus_dir, "--out", asg) == 0
    rows = read_csv(asg)
    assert rows[0] == ["item_id", "cluster_id"]
    assert len(rows) == 7
    assert {r[1] for r in rows[1:]} == {"0", "1"}
    out = tmp_path / "metrics.csv"
    assert run_cli("evaluate-clustering", "--assignments", asg,
                   "--truth", corpus_dir / "manifest.csv",
                   "--no-figures", "--out", out) == 0
    metrics = dict(read_csv(out)[1:])
    assert set(metrics) == {"purity", "nmi", "rand", "precision", "recall", "f"}
    # the two families are trivially separable at this size
    assert float(metrics["purity"]) == 1.0


def test_cluster_kmeans(corpus_dir, tmp_path):
    asg = tmp_path / "kasg.csv"
    assert run_cli("cluster", "--algo", "kmeans", "--k", 2, "--measure", "euclid",
                   "--m", 2, "--max-iter", 8, "--seed", 5,
                   "--corpus", corpus_dir, "--out", asg) == 0
    assert len(read_csv(asg)) == 7


def test_cluster_ward_rejects_measure(corpus_dir, tmp_path):
    code = run_cli("cluster", "--algo", "hac", "--k", 2, "--measure", "jaccard",
                   "--criterion", "ward", "--m", 2,
                   "--corpus", corpus_dir, "--out", tmp_path / "x.csv")
    assert code == 2


def test_sweep_retrieval_row_count(corpus_dir, tmp_path):
    out = tmp_path / "sw.csv"
    assert run_cli("sweep", "--corpus", corpus_dir, "--ks", "1,2",
                   "--measures", "jaccard,overlap,euclid", "--no-figures",
                   "--out", out) == 0
    rows = read_csv(out)
    assert rows[0] == ["k", "measure", "map", "mean_p_at"]
    assert len(rows) == 1 + 2 * 3


def test_sweep_clustering_row_count(corpus_dir, tmp_path):
    out = tmp_path / "swc.csv"
    assert run_cli("sweep", "--corpus", corpus_dir, "--ks", "2",
                   "--measures", "jaccard,cos-tfidf", "--criteria",
                   "complete,average,ward", "--m", 2, "--no-figures",
                   "--out", out) == 0
    rows = read_csv(out)
    # ward contributes one row per k, the other criteria one per measure
    assert len(rows) == 1 + 2 * 2 + 1
    assert rows[0][:3] == ["k", "measure", "criterion"]


def test_usage_errors_exit_1(tmp_path):
    assert run_cli("fingerprint", "--k", 0, "--in", tmp_path, "--out",
                   tmp_path / "x.csv") == 1
    assert run_cli("no-such-command") == 1
    assert run_cli("query", "--k", 1, "--measure", "nope", "--corpus", tmp_path,
                   "--query", "all", "--out", tmp_path / "x.csv") == 1


def test_data_errors_exit_2(tmp_path):
    bad = tmp_path / "bad.tg1"
    bad.write_text("not a graph\n")
    assert run_cli("fingerprint", "--k", 2, "--in", bad,
                   "--out", tmp_path / "x.csv") == 2
    empty = tmp_path / "empty"
    empty.mkdir()
    assert run_cli("query", "--k", 2, "--measure", "jaccard", "--corpus", empty,
                   "--query", "all", "--out", tmp_path / "x.csv") == 2


def test_config_file_supplies_defaults(corpus_dir, tmp_path):
    cfg = tmp_path / "flags.cfg"
    cfg.write_text(
        f"# defaults\nk=2\nmeasure=jaccard\ncorpus={corpus_dir}\n"
        f"figures=false\nout={tmp_path / 'cfg.csv'}\n"
    )
    assert run_cli("--config", cfg, "evaluate-retrieval") == 0
    summary = dict(read_csv(tmp_path / "cfg_summary.csv")[1:])
    assert summary["measure"] == "jaccard"
    # explicit flags still win over the config file
    assert run_cli("--config", cfg, "evaluate-retrieval", "--measure", "overlap") == 0
    summary = dict(read_csv(tmp_path / "cfg_summary.csv")[1:])
    assert summary["measure"] == "overlap"


def test_bench_writes_rows(tmp_path):
    out = tmp_path / "bn.csv"
    assert run_cli("bench", "--sizes", "200,400", "--ks", "2", "--measures",
                   "ham-bool,jaccard", "--runs", 1, "--items", 4,
                   "--no-figures", "--out", out) == 0
    rows = read_csv(out)
    assert rows[0] == ["size", "k", "measure", "fingerprint_s", "matrix_s"]
    assert len(rows) == 1 + 2 * 2
    assert all(float(r[3]) > 0 and float(r[4]) > 0 for r in rows[1:])


def test_console_script_help():
    proc = subprocess.run(
        [sys.executable, "-m", "weaveprint.cli", "--help"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "generate" in proc.stdout
