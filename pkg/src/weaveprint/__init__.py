"""Fingerprinting and retrieval for textile crossing graphs."""

from .graph import (
    TERMINAL,
    NodeSlot,
    TextileGraph,
    TG1Error,
    ValidationIssue,
    ValidationReport,
    load,
    parse,
    save,
    serialize,
    validate,
)
from .fingerprint import (
    EdgeLabel,
    Fingerprint,
    Neighbourhood,
    edge_label,
    fingerprint,
    neighbourhood,
    neighbourhood_code,
    parse_neighbourhood_code,
)
from .distance import (
    MEASURES,
    CorpusStats,
    DistanceMatrix,
    corpus_digest,
    corpus_stats,
    cosine_freq,
    cosine_tfidf,
    distance,
    distance_matrix,
    euclidean,
    hamming_bool,
    hamming_freq,
    jaccard,
    overlap,
    requires_stats,
    tfidf_vector,
)
from .patterns import (
    FAMILY_NAMES,
    GraphBuilder,
    ThreadPathError,
    concat_graphs,
    generate,
    weave_from_layers,
)
from .corpus import (
    TRANSFORMS,
    Corpus,
    CorpusConfig,
    PerturbationPlan,
    build_corpus,
    load_corpus,
    perturb,
    transform,
    write_corpus,
)
from .retrieval import (
    RECALL_LEVELS,
    RankedList,
    RetrievalReport,
    average_precision,
    evaluate_retrieval,
    precision_at,
    rank,
    ranked_from_matrix,
)
from .bench import (
    BenchRow,
    doubling_ratios,
    run_bench,
)
from .cluster import (
    CRITERIA,
    Clustering,
    ClusterReport,
    KMeansResult,
    cluster_distance,
    evaluate_clustering,
    hac,
    kmeans,
    nmi,
    pair_precision_recall_f,
    purity,
    rand_index,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
