"""Command line front end.

Every subcommand is deterministic for fixed flags and seeds: CSV outputs are
byte-identical across runs (bench timings excepted, the numbers are wall
clock).  Figures are rendered next to the delimited output unless
``--no-figures`` is passed.  Exit codes: 0 success, 1 usage error, 2 data or
validation error.
"""

import csv
import glob
import os
import sys

import click

from .cluster import CRITERIA, evaluate_clustering, hac, kmeans
from .corpus import Corpus, CorpusConfig, build_corpus, load_corpus, write_corpus
from .distance import MEASURES, corpus_stats, distance_matrix, requires_stats
from .fingerprint import fingerprint, neighbourhood_code
from .graph import TG1Error, load
from .patterns import FAMILY_NAMES, ThreadPathError
from .retrieval import evaluate_retrieval, rank

CLUSTER_METRICS = ("purity", "nmi", "rand", "precision", "recall", "f")


def _fmt(v) -> str:
    return repr(v) if isinstance(v, float) else str(v)


def _out_writer(path: str):
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
    fh = open(path, "w", encoding="utf-8", newline="")
    return fh, csv.writer(fh, lineterminator="\n")


def _write_rows(path: str, header, rows) -> None:
    fh, w = _out_writer(path)
    with fh:
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _sidecar(path: str, suffix: str) -> str:
    stem, _ = os.path.splitext(path)
    return stem + suffix


def _parse_list(text: str, what: str, allowed=None) -> tuple[str, ...]:
    parts = tuple(p.strip() for p in text.split(",") if p.strip())
    if not parts:
        raise click.BadParameter(f"empty {what} list")
    if allowed is not None:
        bad = [p for p in parts if p not in allowed]
        if bad:
            raise click.BadParameter(
                f"unknown {what}: {', '.join(bad)} (choose from {', '.join(allowed)})"
            )
    return parts


def _parse_ints(text: str, what: str) -> tuple[int, ...]:
    try:
        values = tuple(int(p.strip()) for p in text.split(",") if p.strip())
    except ValueError:
        raise click.BadParameter(f"{what} must be comma-separated integers")
    if not values or min(values) < 1:
        raise click.BadParameter(f"{what} must be positive integers")
    return values


def _load_config(path: str) -> dict:
    cfg = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise click.UsageError(f"{path}:{lineno}: expected key=value")
            key, value = line.split("=", 1)
            cfg[key.strip().replace("-", "_")] = value.strip()
    return cfg


def _corpus_from_dir(corpus_dir: str) -> Corpus:
    manifest = os.path.join(corpus_dir, "manifest.csv")
    if not os.path.isfile(manifest):
        raise click.FileError(manifest, hint="corpus directory has no manifest.csv")
    return load_corpus(manifest)


def _fingerprints(corpus: Corpus, k: int) -> dict:
    return {item: fingerprint(g, k) for item, g in corpus.graphs.items()}


@click.group()
@click.option(
    "--config",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="Flat key=value file supplying defaults for any flag.",
)
@click.pass_context
def cli(ctx, config):
    """Model textiles as crossing graphs and compare their fingerprints."""
    if config:
        defaults = _load_config(config)
        ctx.default_map = {
            name: _flags_to_params(cmd, defaults)
            for name, cmd in cli.commands.items()
        }


def _flags_to_params(cmd, cfg: dict) -> dict:
    # config keys mirror flag spellings, click defaults are keyed by param name
    out = {}
    for param in cmd.params:
        for opt in param.opts:
            if opt.startswith("--") and opt[2:].replace("-", "_") in cfg:
                out[param.name] = cfg[opt[2:].replace("-", "_")]
    return out


@cli.command()
@click.option("--families", default="all", show_default=True,
              help="Comma-separated family names, or 'all'.")
@click.option("--samples", type=int, default=25, show_default=True)
@click.option("--rows", type=int, default=24, show_default=True)
@click.option("--cols", type=int, default=24, show_default=True)
@click.option("--size-range", default=None,
              help="LO:HI bounds for per-sample size draws (overrides rows-based bounds).")
@click.option("--flip-rate", type=float, default=0.01, show_default=True)
@click.option("--rotate-rate", type=float, default=0.85, show_default=True)
@click.option("--mirror-rate", type=float, default=0.35, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", required=True, type=click.Path(file_okay=False))
def generate(families, samples, rows, cols, size_range, flip_rate, rotate_rate,
             mirror_rate, seed, out):
    """Generate a labelled corpus of TG1 files plus manifest.csv."""
    fams = FAMILY_NAMES if families == "all" else _parse_list(
        families, "family", FAMILY_NAMES)
    size_low = size_high = None
    if size_range:
        try:
            lo, hi = size_range.split(":")
            size_low, size_high = int(lo), int(hi)
        except ValueError:
            raise click.BadParameter("--size-range must look like LO:HI")
    cfg = CorpusConfig(
        families=fams, samples=samples, rows=rows, cols=cols,
        size_low=size_low, size_high=size_high, flip_rate=flip_rate,
        rotate_rate=rotate_rate, mirror_rate=mirror_rate, seed=seed,
    )
    manifest = write_corpus(build_corpus(cfg), out)
    click.echo(manifest)


@cli.command("fingerprint")
@click.option("--k", type=click.IntRange(min=1), required=True)
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def fingerprint_cmd(k, in_path, out):
    """Extract k-neighbourhood fingerprints to CSV rows graph_id,code,count."""
    if k < 1:
        raise click.BadParameter("--k must be at least 1")
    if os.path.isdir(in_path):
        manifest = os.path.join(in_path, "manifest.csv")
        if os.path.isfile(manifest):
            corpus = load_corpus(manifest)
            graphs = corpus.graphs
        else:
            files = sorted(glob.glob(os.path.join(in_path, "*.tg1")))
            if not files:
                raise click.FileError(in_path, hint="no manifest.csv and no .tg1 files")
            graphs = {os.path.splitext(os.path.basename(p))[0]: load(p) for p in files}
    else:
        graphs = {os.path.splitext(os.path.basename(in_path))[0]: load(in_path)}
    rows = []
    for item in sorted(graphs):
        fp = fingerprint(graphs[item], k)
        coded = sorted((neighbourhood_code(key), c) for key, c in fp.counts.items())
        rows.extend((item, code, c) for code, c in coded)
    _write_rows(out, ["graph_id", "neighbourhood_code", "count"], rows)


@cli.command()
@click.option("--k", type=click.IntRange(min=1), required=True)
@click.option("--measure", type=click.Choice(MEASURES), required=True)
@click.option("--corpus", "corpus_dir", required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--query", required=True,
              help="Path to a TG1 file, a corpus item id, or 'all'.")
@click.option("--cutoff", type=int, default=None,
              help="Keep only the first CUTOFF results per query.")
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def query(k, measure, corpus_dir, query, cutoff, jobs, out):
    """Rank corpus items by distance to one query, or to every item in turn."""
    corpus = _corpus_from_dir(corpus_dir)
    fps = _fingerprints(corpus, k)
    stats = corpus_stats(fps.values()) if requires_stats(measure) else None
    rows = []
    if query == "all":
        ids = list(fps)
        dm = distance_matrix([fps[i] for i in ids], measure, stats=stats,
                             ids=ids, jobs=jobs)
        from .retrieval import ranked_from_matrix

        ranked_lists = [ranked_from_matrix(dm, ids, qi) for qi in range(len(ids))]
    elif query in fps:
        ranked_lists = [rank(fps, query, measure, stats)]
    else:
        if not os.path.isfile(query):
            raise click.FileError(query, hint="query is neither an item id nor a file")
        qfp = fingerprint(load(query), k)
        ranked = rank(fps, qfp, measure, stats)
        ranked.query = os.path.splitext(os.path.basename(query))[0]
        ranked_lists = [ranked]
    for ranked in ranked_lists:
        items = ranked.items[:cutoff] if cutoff else ranked.items
        rows.extend(
            (ranked.query, pos + 1, item, d)
            for pos, (item, d) in enumerate(items)
        )
    _write_rows(out, ["query_id", "rank", "item_id", "distance"], rows)


def _retrieval_outputs(report, out, figures):
    _write_rows(
        out,
        ["recall_level", "precision", "f_measure"],
        [
            (f"{level:.1f}", p, f)
            for (level, p), (_, f) in zip(report.pr_curve, report.fr_curve)
        ],
    )
    _write_rows(
        _sidecar(out, "_summary.csv"),
        ["metric", "value"],
        [
            ("map", report.mean_ap),
            ("mean_p_at", report.mean_p_at),
            ("cutoff", report.cutoff),
            ("k", report.k),
            ("measure", report.measure),
        ],
    )
    if figures:
        from . import plots

        plots.recall_curves({report.measure: report.pr_curve},
                            _sidecar(out, "_pr.png"))
        plots.recall_curves({report.measure: report.fr_curve},
                            _sidecar(out, "_fr.png"), ylabel="f-measure")


@cli.command("evaluate-retrieval")
@click.option("--k", type=click.IntRange(min=1), required=True)
@click.option("--measure", type=click.Choice(MEASURES), required=True)
@click.option("--corpus", "corpus_dir", required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--cutoff", type=int, default=None,
              help="Fixed precision cutoff; default is each query's category size.")
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--figures/--no-figures", default=True, show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def evaluate_retrieval_cmd(k, measure, corpus_dir, cutoff, jobs, figures, out):
    """Leave-one-in retrieval over the corpus: MAP, MeanP@, PR and FR tables."""
    corpus = _corpus_from_dir(corpus_dir)
    fps = _fingerprints(corpus, k)
    report = evaluate_retrieval(fps, corpus.labels, measure, cutoff=cutoff, jobs=jobs)
    _retrieval_outputs(report, out, figures)


@cli.command()
@click.option("--algo", type=click.Choice(("hac", "kmeans")), required=True)
@click.option("--k", type=click.IntRange(min=1), required=True)
@click.option("--measure", type=click.Choice(MEASURES), default=None,
              help="Required for kmeans and for non-ward hac criteria.")
@click.option("--criterion", type=click.Choice(CRITERIA), default="average",
              show_default=True, help="hac only.")
@click.option("--m", type=int, required=True)
@click.option("--max-iter", type=int, default=10, show_default=True, help="kmeans only.")
@click.option("--seed", type=int, default=0, show_default=True, help="kmeans only.")
@click.option("--corpus", "corpus_dir", required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def cluster(algo, k, measure, criterion, m, max_iter, seed, corpus_dir, jobs, out):
    """Partition the corpus; writes assignments CSV item_id,cluster_id."""
    corpus = _corpus_from_dir(corpus_dir)
    fps = _fingerprints(corpus, k)
    stats = corpus_stats(fps.values()) if measure and requires_stats(measure) else None
    if algo == "kmeans":
        if measure is None:
            raise click.UsageError("kmeans needs an explicit --measure")
        result = kmeans(fps, m, max_iter=max_iter, measure=measure,
                        stats=stats, seed=seed)
        clustering = result.clustering
    else:
        clustering = hac(fps, m, criterion, measure, stats=stats, jobs=jobs)
    assignment = clustering.assignment()
    renumber: dict[int, int] = {}
    rows = []
    for item in sorted(assignment):
        cid = renumber.setdefault(assignment[item], len(renumber))
        rows.append((item, cid))
    _write_rows(out, ["item_id", "cluster_id"], rows)


@cli.command("evaluate-clustering")
@click.option("--assignments", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="CSV written by the cluster subcommand.")
@click.option("--truth", required=True, type=click.Path(exists=True, dir_okay=False),
              help="Corpus manifest.csv with the true labels.")
@click.option("--figures/--no-figures", default=True, show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def evaluate_clustering_cmd(assignments, truth, figures, out):
    """Score an assignments file against manifest labels."""
    blocks: dict[str, list[str]] = {}
    with open(assignments, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["item_id", "cluster_id"]:
            raise ValueError(f"{assignments}: expected an 'item_id,cluster_id' header")
        for row in reader:
            if len(row) < 2:
                raise ValueError(f"{assignments}: short row {row!r}")
            blocks.setdefault(row[1], []).append(row[0])
    labels = load_corpus(truth).labels
    report = evaluate_clustering(list(blocks.values()), labels)
    _write_rows(out, ["metric", "value"],
                [(name, getattr(report, name)) for name in CLUSTER_METRICS])
    if figures:
        from . import plots

        plots.clustering_bars(
            [("clustering", {name: getattr(report, name) for name in CLUSTER_METRICS})],
            _sidecar(out, ".png"),
        )


@cli.command()
@click.option("--corpus", "corpus_dir", required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--ks", default="2,3,4", show_default=True)
@click.option("--measures", default=",".join(MEASURES), show_default=True)
@click.option("--criteria", default=None,
              help="Comma list of hac criteria; omit for a retrieval sweep.")
@click.option("--m", type=int, default=16, show_default=True)
@click.option("--cutoff", type=int, default=None)
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--figures/--no-figures", default=True, show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def sweep(corpus_dir, ks, measures, criteria, m, cutoff, jobs, figures, out):
    """Grid of evaluations over k and measure (and hac criterion)."""
    corpus = _corpus_from_dir(corpus_dir)
    k_list = _parse_ints(ks, "--ks")
    measure_list = _parse_list(measures, "measure", MEASURES)
    crit_list = _parse_list(criteria, "criterion", CRITERIA) if criteria else ()
    rows = []
    for k in k_list:
        fps = _fingerprints(corpus, k)
        stats = corpus_stats(fps.values())
        if not crit_list:
            for measure in measure_list:
                rep = evaluate_retrieval(fps, corpus.labels, measure,
                                         stats=stats, cutoff=cutoff, jobs=jobs)
                rows.append((k, measure, rep.mean_ap, rep.mean_p_at))
            continue
        ids = list(fps)
        matrices = {
            measure: distance_matrix([fps[i] for i in ids], measure,
                                     stats=stats, ids=ids, jobs=jobs)
            for measure in measure_list
        }
        for criterion in crit_list:
            if criterion == "ward":
                rep = evaluate_clustering(hac(fps, m, "ward"), corpus.labels)
                rows.append((k, "-", "ward")
                            + tuple(getattr(rep, f) for f in CLUSTER_METRICS))
                continue
            for measure in measure_list:
                c = hac(fps, m, criterion, measure, stats=stats,
                        matrix=matrices[measure])
                rep = evaluate_clustering(c, corpus.labels)
                rows.append((k, measure, criterion)
                            + tuple(getattr(rep, f) for f in CLUSTER_METRICS))
    if crit_list:
        _write_rows(out, ["k", "measure", "criterion", *CLUSTER_METRICS], rows)
    else:
        _write_rows(out, ["k", "measure", "map", "mean_p_at"], rows)
    if figures:
        from . import plots

        if crit_list:
            for k in k_list:
                plots.clustering_bars(
                    [
                        (f"{r[2]}+{r[1]}", dict(zip(CLUSTER_METRICS, r[3:])))
                        for r in rows
                        if r[0] == k
                    ],
                    _sidecar(out, f"_k{k}.png"),
                )
        else:
            plots.map_by_k([(r[0], r[1], r[2]) for r in rows], _sidecar(out, ".png"))


@cli.command()
@click.option("--sizes", default="1000,2000,4000,8000", show_default=True)
@click.option("--ks", default="2,4", show_default=True)
@click.option("--measures", default=",".join(MEASURES), show_default=True)
@click.option("--runs", type=int, default=5, show_default=True)
@click.option("--items", type=int, default=24, show_default=True,
              help="Swatches per distance matrix.")
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--figures/--no-figures", default=True, show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def bench(sizes, ks, measures, runs, items, jobs, figures, out):
    """Median wall times for fingerprint extraction and matrix builds."""
    from .bench import run_bench

    rows = run_bench(
        sizes=_parse_ints(sizes, "--sizes"),
        ks=_parse_ints(ks, "--ks"),
        measures=_parse_list(measures, "measure", MEASURES),
        runs=runs,
        matrix_items=items,
        jobs=jobs,
    )
    _write_rows(
        out,
        ["size", "k", "measure", "fingerprint_s", "matrix_s"],
        [(r.size, r.k, r.measure, f"{r.fingerprint_s:.6f}", f"{r.matrix_s:.6f}")
         for r in rows],
    )
    if figures:
        from . import plots

        plots.bench_curves(rows, _sidecar(out, ".png"))


@cli.command()
@click.option("--seed", type=int, default=7, show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--figures/--no-figures", default=True, show_default=True)
@click.option("--out", required=True, type=click.Path(file_okay=False))
def repro(seed, jobs, figures, out):
    """Regenerate the reference corpus and rerun the headline experiments."""
    os.makedirs(out, exist_ok=True)
    corpus = build_corpus(CorpusConfig(seed=seed))
    write_corpus(corpus, os.path.join(out, "corpus"))
    click.echo(f"corpus: {len(corpus)} items", err=True)

    fps = {k: _fingerprints(corpus, k) for k in (2, 3, 4)}
    stats = {k: corpus_stats(fps[k].values()) for k in fps}

    retrieval_rows = []
    for k in (3, 4):
        for measure in MEASURES:
            rep = evaluate_retrieval(fps[k], corpus.labels, measure,
                                     stats=stats[k], jobs=jobs)
            retrieval_rows.append((k, measure, rep.mean_ap, rep.mean_p_at))
    _write_rows(os.path.join(out, "retrieval.csv"),
                ["k", "measure", "map", "mean_p_at"], retrieval_rows)
    detail = evaluate_retrieval(fps[4], corpus.labels, "jaccard", jobs=jobs)
    _retrieval_outputs(detail, os.path.join(out, "retrieval_k4_jaccard.csv"), figures)

    grid_measures = ("jaccard", "overlap", "cos-freq", "cos-tfidf")
    ids = list(fps[2])
    matrices = {
        measure: distance_matrix([fps[2][i] for i in ids], measure,
                                 stats=stats[2], ids=ids, jobs=jobs)
        for measure in grid_measures
    }
    cluster_rows = []
    for criterion in ("single", "complete", "average"):
        for measure in grid_measures:
            c = hac(fps[2], 16, criterion, measure, stats=stats[2],
                    matrix=matrices[measure])
            rep = evaluate_clustering(c, corpus.labels)
            cluster_rows.append((2, measure, criterion)
                                + tuple(getattr(rep, f) for f in CLUSTER_METRICS))
    rep = evaluate_clustering(hac(fps[2], 16, "ward"), corpus.labels)
    cluster_rows.append((2, "-", "ward")
                        + tuple(getattr(rep, f) for f in CLUSTER_METRICS))
    _write_rows(os.path.join(out, "clustering.csv"),
                ["k", "measure", "criterion", *CLUSTER_METRICS], cluster_rows)

    stability_rows = []
    for measure in MEASURES:
        per_budget = []
        for budget in (5, 10):
            r = kmeans(fps[4], 16, max_iter=budget, measure=measure,
                       stats=stats[4], seed=6)
            per_budget.append(evaluate_clustering(r.clustering, corpus.labels))
        m5, m10 = per_budget
        diff = max(abs(getattr(m5, f) - getattr(m10, f)) for f in CLUSTER_METRICS)
        stability_rows.append((measure, m5.f, m10.f, diff))
    _write_rows(os.path.join(out, "kmeans_stability.csv"),
                ["measure", "f_5_iterations", "f_10_iterations", "max_metric_diff"],
                stability_rows)

    by_measure = {r[1]: r[2] for r in retrieval_rows if r[0] == 4}
    winner = next(r for r in cluster_rows if r[1] == "cos-tfidf" and r[2] == "complete")
    summary = [
        ("map_k4_jaccard", by_measure["jaccard"]),
        ("map_k4_ham_bool", by_measure["ham-bool"]),
        ("map_k4_minus_k3_jaccard",
         by_measure["jaccard"] - next(r[2] for r in retrieval_rows
                                      if r[0] == 3 and r[1] == "jaccard")),
        ("complete_cos_tfidf_f", winner[3 + CLUSTER_METRICS.index("f")]),
        ("complete_cos_tfidf_purity", winner[3 + CLUSTER_METRICS.index("purity")]),
        ("best_grid_f", max(r[3 + CLUSTER_METRICS.index("f")] for r in cluster_rows)),
        ("kmeans_max_metric_diff", max(r[3] for r in stability_rows)),
    ]
    _write_rows(os.path.join(out, "summary.csv"), ["name", "value"], summary)
    if figures:
        from . import plots

        plots.map_by_k([(r[0], r[1], r[2]) for r in retrieval_rows],
                       os.path.join(out, "map_by_k.png"))
        plots.clustering_bars(
            [(f"{r[2]}+{r[1]}", dict(zip(CLUSTER_METRICS, r[3:])))
             for r in cluster_rows],
            os.path.join(out, "clustering.png"),
        )
    click.echo(os.path.join(out, "summary.csv"))


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Abort:
        return 130
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        exc.show(file=sys.stderr)
        return 1
    except click.ClickException as exc:
        exc.show(file=sys.stderr)
        return 2
    except (TG1Error, ThreadPathError, ValueError, KeyError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
