"""Agglomerative and k-means clustering of fingerprints, with quality metrics.

Both algorithms operate on the sparse count vectors.  All tie-breaking is
by index so runs reproduce exactly: the agglomerative merge loop prefers the
lowest cluster-id pair among equal distances, and k-means assigns to the
lowest centroid index among equal distances.
"""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .distance import (
    CorpusStats,
    DistanceMatrix,
    _cosine,
    _euclid,
    _ham_bool,
    _ham_freq,
    _jaccard,
    _overlap,
    corpus_stats,
    distance_matrix,
    tfidf_vector,
    MEASURES,
)
from .fingerprint import Fingerprint

CRITERIA = ("ward", "single", "complete", "average")


@dataclass
class Clustering:
    """A flat partition of item ids, with provenance."""

    clusters: list[list[str]]
    algorithm: str = ""
    measure: str | None = None
    criterion: str | None = None
    k: int | None = None
    seed: int | None = None

    @property
    def m(self) -> int:
        return len(self.clusters)

    def assignment(self) -> dict[str, int]:
        return {item: ci for ci, members in enumerate(self.clusters) for item in members}


def _counts_distance(measure: str, a: Mapping, b: Mapping, ta: float, tb: float) -> float:
    if measure == "euclid":
        return _euclid(a, b)
    if measure in ("cos-freq", "cos-tfidf"):
        return _cosine(a, b)
    if measure == "ham-bool":
        return _ham_bool(a, b)
    if measure == "ham-freq":
        return _ham_freq(a, b)
    if measure == "jaccard":
        return _jaccard(a, b)
    if measure == "overlap":
        return _overlap(a, b, ta, tb)
    raise ValueError(f"unknown measure {measure!r}")


def _prepare_vectors(
    fingerprints: Sequence[Fingerprint], measure: str, stats: CorpusStats | None
) -> list[dict]:
    # cos-tfidf clusters the weighted vectors under plain cosine; every
    # other measure works on raw counts.
    if measure == "cos-tfidf":
        st = stats if stats is not None else corpus_stats(fingerprints)
        return [tfidf_vector(fp.counts, st) for fp in fingerprints]
    return [dict(fp.counts) for fp in fingerprints]


# -- agglomerative -----------------------------------------------------


def cluster_distance(
    members_a: Sequence[int],
    members_b: Sequence[int],
    criterion: str,
    matrix: DistanceMatrix | None = None,
    vectors: Sequence[Mapping] | None = None,
) -> float:
    """Distance between two clusters of item indices.

    single, complete and average read pair distances from ``matrix``; ward
    recomputes centroids from ``vectors`` and scales the squared euclidean
    gap by the size factor ab / (a + b).
    """
    if criterion not in CRITERIA:
        raise ValueError(f"unknown criterion {criterion!r}; expected one of {', '.join(CRITERIA)}")
    if criterion == "ward":
        if vectors is None:
            raise ValueError("ward needs the item vectors")
        return _ward_distance(
            _sum_vectors(vectors, members_a),
            len(members_a),
            _sum_vectors(vectors, members_b),
            len(members_b),
        )
    if matrix is None:
        raise ValueError(f"{criterion} linkage needs the pair distance matrix")
    pairs = [matrix.get(i, j) for i in members_a for j in members_b]
    if criterion == "single":
        return min(pairs)
    if criterion == "complete":
        return max(pairs)
    return sum(pairs) / len(pairs)


def _sum_vectors(vectors: Sequence[Mapping], members: Sequence[int]) -> dict:
    out: dict = {}
    for idx in members:
        for key, v in vectors[idx].items():
            out[key] = out.get(key, 0) + v
    return out


def _ward_distance(sum_a: Mapping, na: int, sum_b: Mapping, nb: int) -> float:
    gap = 0.0
    get = sum_b.get
    for key, v in sum_a.items():
        d = v / na - get(key, 0) / nb
        gap += d * d
    for key, v in sum_b.items():
        if key not in sum_a:
            d = v / nb
            gap += d * d
    return (na * nb) / (na + nb) * gap


def hac(
    fingerprints: Mapping[str, Fingerprint],
    m: int,
    criterion: str,
    measure: str | None = None,
    stats: CorpusStats | None = None,
    matrix: DistanceMatrix | None = None,
    jobs: int = 1,
) -> Clustering:
    """Merge singletons bottom-up until ``m`` clusters remain.

    Ward is tied to squared euclidean geometry and takes no measure; the
    other criteria require one.  Merged clusters get fresh ids in creation
    order, and distances to a merged cluster are updated incrementally
    (exactly the min / max / mean over the underlying pair distances).
    """
    ids = list(fingerprints)
    n = len(ids)
    if not 1 <= m <= n:
        raise ValueError(f"target cluster count {m} out of range 1..{n}")
    if criterion not in CRITERIA:
        raise ValueError(f"unknown criterion {criterion!r}; expected one of {', '.join(CRITERIA)}")
    ward = criterion == "ward"
    if ward:
        if measure not in (None, "euclid"):
            raise ValueError("ward linkage is tied to euclid; pass measure=None")
    else:
        if measure is None:
            raise ValueError(f"{criterion} linkage needs a measure")
        if measure not in MEASURES:
            raise ValueError(f"unknown measure {measure!r}")

    fps = [fingerprints[i] for i in ids]
    members: dict[int, list[int]] = {i: [i] for i in range(n)}

    if ward:
        vectors = _prepare_vectors(fps, "euclid", None)
        sums: dict[int, dict] = {i: dict(vectors[i]) for i in range(n)}
        pair_value = {}
        for a in range(n):
            for b in range(a + 1, n):
                pair_value[(a, b)] = _ward_distance(sums[a], 1, sums[b], 1)
    else:
        if matrix is None:
            matrix = distance_matrix(fps, measure, stats=stats, ids=ids, jobs=jobs)
        elif matrix.n != n:
            raise ValueError("matrix size does not match the corpus")
        pair_value = {}
        pair_count: dict[tuple[int, int], int] = {}
        for a in range(n):
            for b in range(a + 1, n):
                pair_value[(a, b)] = matrix.get(a, b)
                pair_count[(a, b)] = 1

    heap = [(d, a, b) for (a, b), d in pair_value.items()]
    heapq.heapify(heap)
    next_id = n

    while len(members) > m:
        while True:
            d, a, b = heapq.heappop(heap)
            if a in members and b in members and pair_value.get((a, b)) == d:
                break
        merged = members.pop(a) + members.pop(b)
        merged.sort()
        new_id = next_id
        next_id += 1
        for other in list(members):
            ka = (min(a, other), max(a, other))
            kb = (min(b, other), max(b, other))
            if ward:
                pass  # recomputed below from the summed vectors
            else:
                va, vb = pair_value[ka], pair_value[kb]
                if criterion == "single":
                    nd = va if va < vb else vb
                elif criterion == "complete":
                    nd = va if va > vb else vb
                else:
                    ca, cb = pair_count[ka], pair_count[kb]
                    nd = (va * ca + vb * cb) / (ca + cb)
                    pair_count[(other, new_id)] = ca + cb
                pair_value[(other, new_id)] = nd
                heapq.heappush(heap, (nd, other, new_id))
            del pair_value[ka]
            del pair_value[kb]
            if not ward and criterion == "average":
                del pair_count[ka]
                del pair_count[kb]
        if ward:
            sa = sums.pop(a)
            sb = sums.pop(b)
            merged_sum = dict(sa)
            for key, v in sb.items():
                merged_sum[key] = merged_sum.get(key, 0) + v
            sums[new_id] = merged_sum
            for other, om in members.items():
                nd = _ward_distance(merged_sum, len(merged), sums[other], len(om))
                pair_value[(other, new_id)] = nd
                heapq.heappush(heap, (nd, other, new_id))
        members[new_id] = merged

    blocks = sorted(members.items())
    return Clustering(
        clusters=[[ids[i] for i in block] for _, block in blocks],
        algorithm="hac",
        measure=None if ward else measure,
        criterion=criterion,
        k=fps[0].k if fps else None,
    )


# -- k-means -----------------------------------------------------------


@dataclass
class KMeansResult:
    clustering: Clustering
    iterations: int
    converged: bool
    objective: list[float] = field(default_factory=list)


def kmeans(
    fingerprints: Mapping[str, Fingerprint],
    m: int,
    max_iter: int,
    measure: str,
    stats: CorpusStats | None = None,
    seed: int = 0,
) -> KMeansResult:
    """Lloyd iterations over sparse vectors with seeded initialisation.

    Initial centroids are a seeded sample of ``m`` distinct items.  Empty
    clusters are repaired by stealing the globally farthest item from its
    centroid.  Convergence means every centroid component moved by at most
    1e-9.
    """
    ids = list(fingerprints)
    n = len(ids)
    if not 1 <= m <= n:
        raise ValueError(f"target cluster count {m} out of range 1..{n}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be positive, got {max_iter}")
    if measure not in MEASURES:
        raise ValueError(f"unknown measure {measure!r}")
    fps = [fingerprints[i] for i in ids]
    vectors = _prepare_vectors(fps, measure, stats)
    totals = [sum(v.values()) for v in vectors]

    rng = random.Random(seed)
    centroids = [dict(vectors[i]) for i in rng.sample(range(n), m)]
    centroid_totals = [sum(c.values()) for c in centroids]

    assign = [0] * n
    dists = [0.0] * n
    iterations = 0
    converged = False
    objective: list[float] = []
    for _ in range(max_iter):
        iterations += 1
        for i, vec in enumerate(vectors):
            best = None
            for ci in range(m):
                d = _counts_distance(measure, vec, centroids[ci], totals[i], centroid_totals[ci])
                if best is None or d < best[0]:
                    best = (d, ci)
            dists[i] = best[0]
            assign[i] = best[1]
        # refill any cluster that lost all members with the worst-fitting item
        sizes = [0] * m
        for ci in assign:
            sizes[ci] += 1
        for empty in range(m):
            if sizes[empty]:
                continue
            candidates = [
                (-dists[i], i) for i in range(n) if sizes[assign[i]] > 1
            ]
            if not candidates:
                break
            _, steal = min(candidates)
            sizes[assign[steal]] -= 1
            assign[steal] = empty
            sizes[empty] = 1
            dists[steal] = 0.0
        objective.append(sum(dists))
        moved = 0.0
        new_centroids = []
        for ci in range(m):
            idxs = [i for i in range(n) if assign[i] == ci]
            if not idxs:
                new_centroids.append(centroids[ci])
                continue
            summed = _sum_vectors(vectors, idxs)
            centroid = {key: v / len(idxs) for key, v in summed.items()}
            old = centroids[ci]
            delta = 0.0
            for key, v in centroid.items():
                d = abs(v - old.get(key, 0.0))
                if d > delta:
                    delta = d
            for key, v in old.items():
                if key not in centroid and abs(v) > delta:
                    delta = abs(v)
            moved = max(moved, delta)
            new_centroids.append(centroid)
        centroids = new_centroids
        centroid_totals = [sum(c.values()) for c in centroids]
        if moved <= 1e-9:
            converged = True
            break

    blocks: list[list[str]] = [[] for _ in range(m)]
    for i, ci in enumerate(assign):
        blocks[ci].append(ids[i])
    return KMeansResult(
        clustering=Clustering(
            clusters=blocks,
            algorithm="kmeans",
            measure=measure,
            criterion=None,
            k=fps[0].k if fps else None,
            seed=seed,
        ),
        iterations=iterations,
        converged=converged,
        objective=objective,
    )


# -- agreement metrics -------------------------------------------------


def _as_blocks(clustering: "Clustering | Sequence[Sequence[str]]") -> list[list[str]]:
    if isinstance(clustering, Clustering):
        return clustering.clusters
    return [list(block) for block in clustering]


def _check_items(blocks: Sequence[Sequence[str]], truth: Mapping[str, str]) -> int:
    items = [item for block in blocks for item in block]
    if len(items) != len(set(items)):
        raise ValueError("clustering assigns some item twice")
    if set(items) != set(truth):
        raise ValueError("clustering and ground truth cover different items")
    return len(items)


def purity(clustering, truth: Mapping[str, str]) -> float:
    """Fraction of items that agree with their cluster's majority label."""
    blocks = _as_blocks(clustering)
    n = _check_items(blocks, truth)
    acc = 0
    for block in blocks:
        if not block:
            continue
        tally: dict[str, int] = {}
        for item in block:
            tally[truth[item]] = tally.get(truth[item], 0) + 1
        acc += max(tally.values())
    return acc / n


def nmi(clustering, truth: Mapping[str, str]) -> float:
    """Mutual information normalised by the mean of the two entropies (log2).

    Two trivial single-block partitions of the same items are identical, so
    the degenerate 0/0 case evaluates to 1; a trivial partition against a
    non-trivial one scores 0.
    """
    blocks = _as_blocks(clustering)
    n = _check_items(blocks, truth)
    class_sizes: dict[str, int] = {}
    for label in truth.values():
        class_sizes[label] = class_sizes.get(label, 0) + 1
    cluster_sizes = [len(block) for block in blocks if block]
    h_l = -sum(s / n * math.log2(s / n) for s in cluster_sizes)
    h_a = -sum(s / n * math.log2(s / n) for s in class_sizes.values())
    if h_l + h_a == 0.0:
        return 1.0
    info = 0.0
    for block in blocks:
        if not block:
            continue
        tally: dict[str, int] = {}
        for item in block:
            tally[truth[item]] = tally.get(truth[item], 0) + 1
        for label, joint in tally.items():
            info += (
                joint
                / n
                * math.log2(joint * n / (len(block) * class_sizes[label]))
            )
    return info / ((h_l + h_a) / 2)


def _pair_counts(blocks: Sequence[Sequence[str]], truth: Mapping[str, str]) -> tuple[int, int, int, int]:
    n = _check_items(blocks, truth)
    total = n * (n - 1) // 2
    same_cluster = sum(len(b) * (len(b) - 1) // 2 for b in blocks)
    class_sizes: dict[str, int] = {}
    for label in truth.values():
        class_sizes[label] = class_sizes.get(label, 0) + 1
    same_class = sum(s * (s - 1) // 2 for s in class_sizes.values())
    tp = 0
    for block in blocks:
        tally: dict[str, int] = {}
        for item in block:
            tally[truth[item]] = tally.get(truth[item], 0) + 1
        tp += sum(c * (c - 1) // 2 for c in tally.values())
    fp = same_cluster - tp
    fn = same_class - tp
    tn = total - tp - fp - fn
    return tp, fp, fn, tn


def rand_index(clustering, truth: Mapping[str, str]) -> float:
    """Fraction of item pairs on which clustering and truth agree."""
    tp, fp, fn, tn = _pair_counts(_as_blocks(clustering), truth)
    total = tp + fp + fn + tn
    return (tp + tn) / total if total else 1.0


def pair_precision_recall_f(clustering, truth: Mapping[str, str]) -> tuple[float, float, float]:
    """Precision, recall and F over same-cluster item pairs."""
    tp, fp, fn, _ = _pair_counts(_as_blocks(clustering), truth)
    precision = tp / (tp + fp) if tp + fp else 1.0
    recall = tp / (tp + fn) if tp + fn else 1.0
    f = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f


@dataclass
class ClusterReport:
    purity: float
    nmi: float
    rand: float
    precision: float
    recall: float
    f: float


def evaluate_clustering(clustering, truth: Mapping[str, str]) -> ClusterReport:
    """All agreement metrics for one clustering against labels."""
    p, r, f = pair_precision_recall_f(clustering, truth)
    return ClusterReport(
        purity=purity(clustering, truth),
        nmi=nmi(clustering, truth),
        rand=rand_index(clustering, truth),
        precision=p,
        recall=r,
        f=f,
    )
