"""Wall-clock benchmarks for fingerprint extraction and distance matrices.

Times are medians over repeated runs on freshly generated plain weaves, so
they track the cost model (walk extraction linear in crossings and in walk
length, matrix cost quadratic in items) rather than cache luck.
"""

import gc
import statistics
import time
from dataclasses import dataclass
from typing import Iterable, Sequence

from .distance import MEASURES, corpus_stats, distance_matrix
from .fingerprint import fingerprint
from .patterns import generate

DEFAULT_SIZES = (1000, 2000, 4000, 8000)
DEFAULT_KS = (2, 4)

# rows*cols factorizations giving the exact crossing budgets above
_GRIDS = {1000: (25, 40), 2000: (25, 80), 4000: (50, 80), 8000: (80, 100)}


@dataclass(frozen=True)
class BenchRow:
    size: int
    k: int
    measure: str
    fingerprint_s: float
    matrix_s: float


def _grid_for(size: int) -> tuple[int, int]:
    if size in _GRIDS:
        return _GRIDS[size]
    rows = max(1, int(size**0.5))
    cols = max(1, round(size / rows))
    return rows, cols


def _median_times(cells: dict, runs: int, target: float = 0.05) -> dict:
    """Median per-call time for every cell, sampled round-robin.

    Each sample times a block of repeated calls sized so the block lasts
    about ``target`` seconds: scheduler and collector noise is large relative
    to a single call at the small end of the size range.  Interleaving the
    cells spreads slow clock drift evenly instead of folding it into
    whichever cell ran last.
    """
    samples: dict = {key: [] for key in cells}
    repeats: dict = {}
    was_enabled = gc.isenabled()
    gc.disable()
    try:
        for key, fn in cells.items():
            t0 = time.perf_counter()
            fn()  # warmup doubles as the scale probe
            single = time.perf_counter() - t0
            repeats[key] = max(1, int(target / max(single, 1e-9)))
        for _ in range(runs):
            for key, fn in cells.items():
                repeat = repeats[key]
                t0 = time.perf_counter()
                for _ in range(repeat):
                    fn()
                samples[key].append((time.perf_counter() - t0) / repeat)
                gc.collect()
    finally:
        if was_enabled:
            gc.enable()
    return {key: statistics.median(vals) for key, vals in samples.items()}


def run_bench(
    sizes: Sequence[int] = DEFAULT_SIZES,
    ks: Sequence[int] = DEFAULT_KS,
    measures: Iterable[str] = MEASURES,
    runs: int = 5,
    matrix_items: int = 24,
    jobs: int = 1,
) -> list[BenchRow]:
    """Time fingerprint extraction and full matrix builds per (size, k, measure).

    Each size is a crossing budget for one plain swatch; the matrix is built
    over ``matrix_items`` swatches of that size with slightly varied column
    counts so the vectors are not all identical.
    """
    measures = tuple(measures)
    for m in measures:
        if m not in MEASURES:
            raise ValueError(f"unknown measure {m!r}")
    if runs < 1:
        raise ValueError("runs must be at least 1")
    if not sizes or not ks:
        raise ValueError("sizes and ks must be non-empty")
    if min(sizes) < 1 or min(ks) < 1:
        raise ValueError("sizes and ks must be positive")
    if matrix_items < 2:
        raise ValueError("matrix_items must be at least 2")
    graphs = {}
    corpora = {}
    for size in sizes:
        rows, cols = _grid_for(size)
        graphs[size] = generate("plain", rows, cols)
        # column jitter keeps the corpus non-degenerate without moving the budget much
        corpora[size] = [
            generate("plain", rows, cols + (i % 5)) for i in range(matrix_items)
        ]
    fp_cells = {
        (size, k): (lambda g=graphs[size], kk=k: fingerprint(g, kk))
        for size in sizes
        for k in ks
    }
    fp_times = _median_times(fp_cells, runs)
    mat_cells = {}
    for size in sizes:
        for k in ks:
            fps = [fingerprint(g, k) for g in corpora[size]]
            stats = corpus_stats(fps)
            for measure in measures:
                mat_cells[(size, k, measure)] = (
                    lambda f=fps, m=measure, s=stats: distance_matrix(
                        f, m, stats=s, jobs=jobs
                    )
                )
    mat_times = _median_times(mat_cells, runs)
    return [
        BenchRow(size, k, measure, fp_times[(size, k)], mat_times[(size, k, measure)])
        for size in sizes
        for k in ks
        for measure in measures
    ]


def doubling_ratios(rows: Sequence[BenchRow]) -> dict[str, list[float]]:
    """Fingerprint-time growth factors per doubling of size and of k."""
    fp: dict[tuple[int, int], float] = {}
    for r in rows:
        fp[(r.size, r.k)] = r.fingerprint_s
    by_size: list[float] = []
    by_k: list[float] = []
    for (size, k), t in sorted(fp.items()):
        if (2 * size, k) in fp and t > 0:
            by_size.append(fp[(2 * size, k)] / t)
        if (size, 2 * k) in fp and t > 0:
            by_k.append(fp[(size, 2 * k)] / t)
    return {"size": by_size, "k": by_k}
