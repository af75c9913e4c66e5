"""Similarity retrieval over fingerprint corpora, with IR-style evaluation.

Items are ranked by ascending distance to the query; the query itself never
appears in its own result list.  Ties are broken by item id so runs are
reproducible.  Relevance is categorical: an item is relevant to a query when
both carry the same label.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .distance import CorpusStats, DistanceMatrix, distance, distance_matrix
from .fingerprint import Fingerprint

RECALL_LEVELS = tuple(l / 10 for l in range(11))


@dataclass
class RankedList:
    query: str
    items: list[tuple[str, float]]  # (item id, distance), best first


def rank(
    fingerprints: Mapping[str, Fingerprint],
    query: "str | Fingerprint",
    measure: str,
    stats: CorpusStats | None = None,
) -> RankedList:
    """Rank a corpus against one query.

    ``query`` may be an item id (that item is excluded from its own list) or
    an out-of-corpus fingerprint.
    """
    if isinstance(query, str):
        if query not in fingerprints:
            raise KeyError(f"query {query!r} is not in the corpus")
        qfp = fingerprints[query]
        exclude = query
        name = query
    else:
        qfp = query
        exclude = None
        name = "<external>"
    scored = [
        (distance(measure, qfp, fp, stats), item)
        for item, fp in fingerprints.items()
        if item != exclude
    ]
    scored.sort()
    return RankedList(name, [(item, d) for d, item in scored])


def ranked_from_matrix(dm: DistanceMatrix, ids: Sequence[str], qi: int) -> RankedList:
    """Ranked list for item ``qi`` out of a precomputed matrix."""
    scored = [(dm.get(qi, j), ids[j]) for j in range(dm.n) if j != qi]
    scored.sort()
    return RankedList(ids[qi], [(item, d) for d, item in scored])


# -- metrics -----------------------------------------------------------


def _relevance_flags(ranked: RankedList, labels: Mapping[str, str], category: str) -> list[bool]:
    return [labels[item] == category for item, _ in ranked.items]


def average_precision(
    ranked: RankedList, labels: Mapping[str, str], category: str | None = None
) -> float:
    """Mean of the precisions at each relevant rank."""
    category = category if category is not None else labels[ranked.query]
    flags = _relevance_flags(ranked, labels, category)
    total = sum(flags)
    if total == 0:
        raise ValueError(f"no relevant items for query {ranked.query!r}")
    hits = 0
    acc = 0.0
    for i, rel in enumerate(flags, start=1):
        if rel:
            hits += 1
            acc += hits / i
    return acc / total

def precision_at(
    ranked: RankedList,
    labels: Mapping[str, str],
    cutoff: int,
    category: str | None = None,
) -> float:
    """Fraction of the first ``cutoff`` results that are relevant."""
    if cutoff < 1:
        raise ValueError(f"cutoff must be positive, got {cutoff}")
    category = category if category is not None else labels[ranked.query]
    hits = sum(
        1 for item, _ in ranked.items[:cutoff] if labels[item] == category
    )
    return hits / cutoff


def _interpolated_precision(flags: Sequence[bool]) -> list[float]:
    # Highest precision at any rank whose recall reaches each level.
    total = sum(flags)
    curve: list[tuple[float, float]] = []
    hits = 0
    for i, rel in enumerate(flags, start=1):
        if rel:
            hits += 1
            curve.append((hits / total, hits / i))
    out = []
    for level in RECALL_LEVELS:
        best = 0.0
        for recall, prec in curve:
            if recall >= level - 1e-12 and prec > best:
                best = prec
        out.append(best)
    return out


@dataclass
class RetrievalReport:
    measure: str
    k: int
    mean_ap: float
    mean_p_at: float
    cutoff: int
    pr_curve: list[tuple[float, float]]  # (recall level, mean precision)
    fr_curve: list[tuple[float, float]]  # (recall level, mean f-measure)
    ap_by_query: dict[str, float]


def evaluate_retrieval(
    fingerprints: Mapping[str, Fingerprint],
    labels: Mapping[str, str],
    measure: str,
    stats: CorpusStats | None = None,
    cutoff: int | None = None,
    matrix: DistanceMatrix | None = None,
    jobs: int = 1,
) -> RetrievalReport:
    """Run every item as a query and aggregate the metrics.

    ``cutoff`` defaults to the query's own category size.  A precomputed
    matrix for the same item order can be passed to skip the pair loop.
    """
    ids = list(fingerprints)
    if matrix is None:
        matrix = distance_matrix(
            [fingerprints[i] for i in ids], measure, stats=stats, ids=ids, jobs=jobs
        )
    elif matrix.n != len(ids):
        raise ValueError("matrix size does not match the corpus")
    category_sizes: dict[str, int] = {}
    for item in ids:
        category_sizes[labels[item]] = category_sizes.get(labels[item], 0) + 1

    aps: dict[str, float] = {}
    p_sum = 0.0
    interp_sums = [0.0] * len(RECALL_LEVELS)
    f_sums = [0.0] * len(RECALL_LEVELS)
    for qi, query in enumerate(ids):
        ranked = ranked_from_matrix(matrix, ids, qi)
        category = labels[query]
        flags = _relevance_flags(ranked, labels, category)
        total = sum(flags)
        if total == 0:
            raise ValueError(f"category {category!r} has a single member: {query!r}")
        hits = 0
        acc = 0.0
        for i, rel in enumerate(flags, start=1):
            if rel:
                hits += 1
                acc += hits / i
        aps[query] = acc / total
        c = cutoff if cutoff is not None else category_sizes[category]
        p_sum += sum(flags[:c]) / c
        interp = _interpolated_precision(flags)
        for li, p in enumerate(interp):
            interp_sums[li] += p
            level = RECALL_LEVELS[li]
            if level > 0.0 and p + level > 0.0:
                f_sums[li] += 2 * p * level / (p + level)

    n = len(ids)
    pr = [(RECALL_LEVELS[li], interp_sums[li] / n) for li in range(len(RECALL_LEVELS))]
    fr = [(RECALL_LEVELS[li], f_sums[li] / n) for li in range(len(RECALL_LEVELS))]
    return RetrievalReport(
        measure=measure,
        k=matrix.k,
        mean_ap=sum(aps.values()) / n,
        mean_p_at=p_sum / n,
        cutoff=cutoff if cutoff is not None else -1,
        pr_curve=pr,
        fr_curve=fr,
        ap_by_query=aps,
    )
