"""Figure rendering for evaluation reports.

Every function writes a PNG and returns the path. The Agg backend is forced
so rendering works without a display.
"""

from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def _finish(fig, path: str) -> str:
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def map_by_k(rows: Sequence[tuple[int, str, float]], path: str) -> str:
    """Line chart of MAP against neighbourhood size, one line per measure.

    ``rows`` are (k, measure, map) triples, e.g. from a retrieval sweep.
    """
    series: dict[str, list[tuple[int, float]]] = {}
    for k, measure, value in rows:
        series.setdefault(measure, []).append((k, value))
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for measure in sorted(series):
        pts = sorted(series[measure])
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=measure)
    ax.set_xlabel("neighbourhood size k")
    ax.set_ylabel("MAP")
    ax.set_ylim(0.0, 1.02)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    return _finish(fig, path)


def recall_curves(
    curves: Mapping[str, Sequence[tuple[float, float]]],
    path: str,
    ylabel: str = "precision",
) -> str:
    """Interpolated precision (or f-measure) over the 11 recall levels."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for name in sorted(curves):
        pts = list(curves[name])
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker=".", label=name)
    ax.set_xlabel("recall level")
    ax.set_ylabel(ylabel)
    ax.set_xlim(0.0, 1.0)
    ax.set_ylim(0.0, 1.02)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    return _finish(fig, path)


def clustering_bars(rows: Sequence[tuple[str, Mapping[str, float]]], path: str) -> str:
    """Grouped bars of clustering metrics, one group per configuration.

    ``rows`` are (config label, {metric: value}) pairs in display order.
    """
    if not rows:
        raise ValueError("no clustering results to plot")
    metrics = list(rows[0][1])
    width = 0.8 / max(1, len(metrics))
    fig, ax = plt.subplots(figsize=(max(6.4, 1.1 * len(rows)), 4.4))
    for j, metric in enumerate(metrics):
        xs = [i + j * width for i in range(len(rows))]
        ax.bar(xs, [r[1][metric] for r in rows], width=width, label=metric)
    ax.set_xticks([i + 0.4 - width / 2 for i in range(len(rows))])
    ax.set_xticklabels([r[0] for r in rows], rotation=45, ha="right", fontsize=7)
    ax.set_ylim(0.0, 1.05)
    ax.grid(True, axis="y", alpha=0.3)
    ax.legend(fontsize=8)
    return _finish(fig, path)


def bench_curves(rows, path: str) -> str:
    """Two panels: fingerprint time by size per k, matrix time by size per measure."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10.4, 4.2))
    fp: dict[int, dict[int, float]] = {}
    mat: dict[str, dict[int, float]] = {}
    for r in rows:
        fp.setdefault(r.k, {})[r.size] = r.fingerprint_s
        mat.setdefault(r.measure, {})[r.size] = r.matrix_s
    for k in sorted(fp):
        pts = sorted(fp[k].items())
        ax1.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=f"k={k}")
    for measure in sorted(mat):
        pts = sorted(mat[measure].items())
        ax2.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=measure)
    for ax, title in ((ax1, "fingerprint extraction"), (ax2, "distance matrix")):
        ax.set_xlabel("crossings")
        ax.set_ylabel("seconds")
        ax.set_xscale("log", base=2)
        ax.set_yscale("log", base=2)
        ax.grid(True, alpha=0.3, which="both")
        ax.set_title(title, fontsize=9)
        ax.legend(fontsize=8)
    return _finish(fig, path)
