"""Distance measures between fingerprints, and all-pairs matrices.

Fingerprints are sparse count vectors indexed by neighbourhood keys.  All
measures iterate the union of the two key sets, so a pair costs O(d1 + d2)
in the numbers of distinct keys.  Measures only compare fingerprints of the
same depth k.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, TextIO

from .fingerprint import Fingerprint, neighbourhood_code

MEASURES = (
    "euclid",
    "cos-freq",
    "cos-tfidf",
    "ham-bool",
    "ham-freq",
    "jaccard",
    "overlap",
)


def requires_stats(measure: str) -> bool:
    return measure == "cos-tfidf"


@dataclass(frozen=True)
class CorpusStats:
    """Collection-level statistics backing the tf-idf weighting."""

    size: int
    presence: Mapping[object, int]

    def idf(self, key) -> float:
        try:
            df = self.presence[key]
        except KeyError:
            raise ValueError(
                f"neighbourhood {key!r} is absent from the corpus statistics"
            ) from None
        return math.log(self.size / df)


def corpus_stats(fingerprints: Iterable[Fingerprint]) -> CorpusStats:
    """Document frequencies over a corpus: in how many items each key occurs."""
    presence: dict = {}
    size = 0
    for fp in fingerprints:
        size += 1
        for key in fp.counts:
            presence[key] = presence.get(key, 0) + 1
    return CorpusStats(size, presence)


def _check_pair(f1: Fingerprint, f2: Fingerprint) -> None:
    if f1.k != f2.k:
        raise ValueError(f"fingerprint depths differ: {f1.k} vs {f2.k}")


def _tf(value: float) -> float:
    # Dampened term frequency; linear below 1 so fractional centroid
    # components stay continuous at 0.
    return value if value < 1.0 else 1.0 + math.log(value)


def tfidf_vector(counts: Mapping, stats: CorpusStats) -> dict:
    """Weight a raw count vector; raises if a key is unknown to the stats."""
    return {key: _tf(v) * stats.idf(key) for key, v in counts.items()}


# -- measure cores on plain dicts -------------------------------------


def _euclid(a: Mapping, b: Mapping) -> float:
    s = 0.0
    get = b.get
    for key, v in a.items():
        d = v - get(key, 0)
        s += d * d
    for key, v in b.items():
        if key not in a:
            s += v * v
    return math.sqrt(s)


def _cosine(a: Mapping, b: Mapping) -> float:
    dot = 0.0
    na = 0.0
    nb = 0.0
    get = b.get
    for key, v in a.items():
        na += v * v
        w = get(key)
        if w is not None:
            dot += v * w
    for v in b.values():
        nb += v * v
    if na == 0.0 and nb == 0.0:
        return 0.0
    if na == 0.0 or nb == 0.0:
        return 1.0
    return max(0.0, 1.0 - dot / math.sqrt(na * nb))


def _ham_bool(a: Mapping, b: Mapping) -> float:
    # count positions with differing values, walking the smaller dict
    if len(a) > len(b):
        a, b = b, a
    only_a = 0
    neq = 0
    get = b.get
    for key, v in a.items():
        w = get(key)
        if w is None:
            only_a += 1
        elif w != v:
            neq += 1
    return float(len(b) - len(a) + 2 * only_a + neq)


def _ham_freq(a: Mapping, b: Mapping) -> float:
    s = 0
    get = b.get
    for key, v in a.items():
        d = v - get(key, 0)
        s += d if d >= 0 else -d
    for key, v in b.items():
        if key not in a:
            s += v
    return float(s)


def _jaccard(a: Mapping, b: Mapping) -> float:
    lo = 0.0
    hi = 0.0
    get = b.get
    for key, v in a.items():
        w = get(key, 0)
        if v < w:
            lo += v
            hi += w
        else:
            lo += w
            hi += v
    for key, v in b.items():
        if key not in a:
            hi += v
    if hi == 0.0:
        return 0.0
    return 1.0 - lo / hi


def _overlap(a: Mapping, b: Mapping, ta: float, tb: float) -> float:
    if ta == 0.0 and tb == 0.0:
        return 0.0
    if ta == 0.0 or tb == 0.0:
        return 1.0
    lo = 0.0
    get = b.get
    for key, v in a.items():
        w = get(key, 0)
        lo += v if v < w else w
    return 1.0 - lo / (ta if ta < tb else tb)


# -- public measures ---------------------------------------------------


def euclidean(f1: Fingerprint, f2: Fingerprint) -> float:
    """Euclidean distance over raw counts."""
    _check_pair(f1, f2)
    return _euclid(f1.counts, f2.counts)


def cosine_freq(f1: Fingerprint, f2: Fingerprint) -> float:
    """One minus the cosine of raw count vectors.

    Scale invariant, so two fabrics of the same pattern but different size
    compare as near identical.  Empty vectors: two empties are at distance
    0, an empty against a non-empty at distance 1.
    """
    _check_pair(f1, f2)
    return _cosine(f1.counts, f2.counts)


def cosine_tfidf(f1: Fingerprint, f2: Fingerprint, stats: CorpusStats) -> float:
    """Cosine distance after tf-idf weighting against corpus statistics."""
    _check_pair(f1, f2)
    return _cosine(tfidf_vector(f1.counts, stats), tfidf_vector(f2.counts, stats))


def hamming_bool(f1: Fingerprint, f2: Fingerprint) -> float:
    """Number of keys whose raw counts differ."""
    _check_pair(f1, f2)
    return _ham_bool(f1.counts, f2.counts)


def hamming_freq(f1: Fingerprint, f2: Fingerprint) -> float:
    """Sum of absolute count differences (L1)."""
    _check_pair(f1, f2)
    return _ham_freq(f1.counts, f2.counts)


def jaccard(f1: Fingerprint, f2: Fingerprint) -> float:
    """One minus the ratio of component-wise minima to maxima."""
    _check_pair(f1, f2)
    return _jaccard(f1.counts, f2.counts)


def overlap(f1: Fingerprint, f2: Fingerprint) -> float:
    """One minus the shared mass relative to the smaller fingerprint."""
    _check_pair(f1, f2)
    return _overlap(f1.counts, f2.counts, f1.total, f2.total)


def distance(measure: str, f1: Fingerprint, f2: Fingerprint, stats: CorpusStats | None = None) -> float:
    """Dispatch by measure name (the CLI spelling)."""
    if measure == "euclid":
        return euclidean(f1, f2)
    if measure == "cos-freq":
        return cosine_freq(f1, f2)
    if measure == "cos-tfidf":
        if stats is None:
            raise ValueError("cos-tfidf needs corpus statistics")
        return cosine_tfidf(f1, f2, stats)
    if measure == "ham-bool":
        return hamming_bool(f1, f2)
    if measure == "ham-freq":
        return hamming_freq(f1, f2)
    if measure == "jaccard":
        return jaccard(f1, f2)
    if measure == "overlap":
        return overlap(f1, f2)
    raise ValueError(f"unknown measure {measure!r}; expected one of {', '.join(MEASURES)}")


# -- all-pairs matrix --------------------------------------------------


@dataclass
class DistanceMatrix:
    """Condensed symmetric matrix over n items (upper triangle, row major)."""

    n: int
    measure: str
    k: int
    values: list[float]
    ids: list[str] | None = None

    def get(self, i: int, j: int) -> float:
        if i == j:
            return 0.0
        if i > j:
            i, j = j, i
        return self.values[i * self.n - i * (i + 1) // 2 + (j - i - 1)]

    def write_csv(self, fh: TextIO, digest: str | None = None) -> None:
        fh.write(f"# measure={self.measure} k={self.k}")
        if digest:
            fh.write(f" corpus={digest}")
        fh.write("\ni,j,distance\n")
        idx = 0
        for i in range(self.n):
            for j in range(i + 1, self.n):
                fh.write(f"{i},{j},{self.values[idx]:.12g}\n")
                idx += 1


def corpus_digest(fingerprints: Sequence[Fingerprint]) -> str:
    """Order-sensitive digest of a fingerprint collection, for provenance."""
    h = hashlib.sha256()
    for fp in fingerprints:
        h.update(f"k={fp.k}".encode())
        for key in sorted(fp.counts, key=neighbourhood_code):
            h.update(f";{neighbourhood_code(key)}:{fp.counts[key]}".encode())
        h.update(b"|")
    return h.hexdigest()[:16]


def _interned(fingerprints: Sequence[Fingerprint]) -> list[dict[int, float]]:
    # Replace tuple keys with small ints so pair loops hash integers only.
    ids: dict = {}
    out = []
    for fp in fingerprints:
        vec = {}
        for key, v in fp.counts.items():
            kid = ids.get(key)
            if kid is None:
                kid = len(ids)
                ids[key] = kid
            vec[kid] = v
        out.append(vec)
    return out


_PAIR_KERNELS = {
    "euclid": _euclid,
    "cos-freq": _cosine,
    "cos-tfidf": _cosine,
    "ham-bool": _ham_bool,
    "ham-freq": _ham_freq,
    "jaccard": _jaccard,
}


def _pairs_block(args):
    measure, vectors, totals, start, end = args
    n = len(vectors)
    out = []
    append = out.append
    if measure == "overlap":
        for i in range(start, end):
            a = vectors[i]
            ta = totals[i]
            for j in range(i + 1, n):
                append(_overlap(a, vectors[j], ta, totals[j]))
        return out
    fn = _PAIR_KERNELS[measure]
    for i in range(start, end):
        a = vectors[i]
        for j in range(i + 1, n):
            append(fn(a, vectors[j]))
    return out


def distance_matrix(
    fingerprints: Sequence[Fingerprint],
    measure: str,
    stats: CorpusStats | None = None,
    ids: list[str] | None = None,
    jobs: int = 1,
) -> DistanceMatrix:
    """All unordered pairs of a corpus under one measure.

    For cos-tfidf the statistics default to the corpus itself and each
    vector is weighted once up front; every other measure works on the raw
    counts.  ``jobs`` > 1 splits the pair loop over worker processes.
    """
    if measure not in MEASURES:
        raise ValueError(f"unknown measure {measure!r}; expected one of {', '.join(MEASURES)}")
    fingerprints = list(fingerprints)
    n = len(fingerprints)
    ks = {fp.k for fp in fingerprints}
    if len(ks) > 1:
        raise ValueError(f"mixed fingerprint depths in corpus: {sorted(ks)}")
    k = ks.pop() if ks else 0

    vectors = _interned(fingerprints)
    totals = [fp.total for fp in fingerprints]
    if measure == "cos-tfidf":
        st = stats if stats is not None else corpus_stats(fingerprints)
        raw = [fp.counts for fp in fingerprints]
        idf_by_int: dict[int, float] = {}
        weighted = []
        for vec, counts in zip(vectors, raw):
            w = {}
            for (kid, v), key in zip(vec.items(), counts):
                f = idf_by_int.get(kid)
                if f is None:
                    f = st.idf(key)
                    idf_by_int[kid] = f
                w[kid] = _tf(v) * f
            weighted.append(w)
        vectors = weighted

    if jobs > 1 and n >= 4:
        values = _parallel_pairs(measure, vectors, totals, jobs)
    else:
        values = _pairs_block((measure, vectors, totals, 0, n))
    return DistanceMatrix(n, measure, k, values, ids)


def _parallel_pairs(measure, vectors, totals, jobs) -> list[float]:
    from concurrent.futures import ProcessPoolExecutor

    n = len(vectors)
    # Balance blocks by pair count: row i contributes n-1-i pairs.
    targets = []
    total_pairs = n * (n - 1) // 2
    per = total_pairs / jobs
    start = 0
    acc = 0
    for i in range(n):
        acc += n - 1 - i
        if acc >= per and start < i + 1:
            targets.append((start, i + 1))
            start = i + 1
            acc = 0
    if start < n:
        targets.append((start, n))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        blocks = pool.map(
            _pairs_block,
            [(measure, vectors, totals, s, e) for s, e in targets],
        )
        out: list[float] = []
        for block in blocks:
            out.extend(block)
    return out
