"""Ranked retrieval and the IR evaluation metrics."""

import math

import pytest

import weaveprint as wp
from weaveprint.fingerprint import Fingerprint
from weaveprint.retrieval import RECALL_LEVELS, RankedList

P1 = wp.parse_neighbourhood_code("[a|a][a|a]")
P2 = wp.parse_neighbourhood_code("[a|t][a|t]")
P3 = wp.parse_neighbourhood_code("[n|n][n|n]")


def small_corpus():
    return {
        "a0": Fingerprint({P1: 4}, k=1),
        "a1": Fingerprint({P1: 4}, k=1),
        "a2": Fingerprint({P1: 3, P2: 1}, k=1),
        "b0": Fingerprint({P3: 4}, k=1),
        "b1": Fingerprint({P3: 4}, k=1),
        "b2": Fingerprint({P3: 3, P2: 1}, k=1),
    }


LABELS = {"a0": "A", "a1": "A", "a2": "A", "b0": "B", "b1": "B", "b2": "B"}


def test_rank_order_and_exclusion():
    ranked = wp.rank(small_corpus(), "a0", "euclid")
    assert ranked.query == "a0"
    assert [item for item, _ in ranked.items] == ["a1", "a2", "b2", "b0", "b1"]
    assert "a0" not in [item for item, _ in ranked.items]
    dists = [d for _, d in ranked.items]
    assert dists == sorted(dists)
    assert dists[0] == 0.0


def test_rank_breaks_ties_by_id():
    # b0 and b1 are identical, so they tie at every distance
    ranked = wp.rank(small_corpus(), "a1", "euclid")
    items = [item for item, _ in ranked.items]
    assert items.index("b0") < items.index("b1")


def test_rank_external_query():
    probe = Fingerprint({P1: 2, P3: 2}, k=1)
    ranked = wp.rank(small_corpus(), probe, "jaccard")
    assert ranked.query == "<external>"
    assert len(ranked.items) == 6


def test_rank_unknown_id():
    with pytest.raises(KeyError):
        wp.rank(small_corpus(), "zz", "euclid")


def test_rank_matches_matrix_path():
    fps = small_corpus()
    ids = list(fps)
    dm = wp.distance_matrix([fps[i] for i in ids], "jaccard", ids=ids)
    for qi, query in enumerate(ids):
        direct = wp.rank(fps, query, "jaccard")
        via = wp.ranked_from_matrix(dm, ids, qi)
        assert [i for i, _ in direct.items] == [i for i, _ in via.items]


def test_average_precision_hand_case():
    ranked = RankedList(
        "q", [("r1", 0.1), ("x1", 0.2), ("r2", 0.3), ("r3", 0.4), ("x2", 0.5)]
    )
    labels = {"q": "A", "r1": "A", "r2": "A", "r3": "A", "x1": "B", "x2": "B"}
    expected = (1 / 1 + 2 / 3 + 3 / 4) / 3
    assert wp.average_precision(ranked, labels) == pytest.approx(expected, abs=1e-12)


def test_average_precision_perfect_is_one():
    ranked = RankedList("q", [("r1", 0.0), ("r2", 0.1), ("x1", 0.9)])
    labels = {"q": "A", "r1": "A", "r2": "A", "x1": "B"}
    assert wp.average_precision(ranked, labels) == 1.0


def test_average_precision_no_relevant():
    ranked = RankedList("q", [("x1", 0.5)])
    labels = {"q": "A", "x1": "B"}
    with pytest.raises(ValueError):
        wp.average_precision(ranked, labels)


def test_precision_at_hand_case():
    ranked = RankedList("q", [("r1", 0.1), ("x1", 0.2), ("r2", 0.3)])
    labels = {"q": "A", "r1": "A", "r2": "A", "x1": "B"}
    assert wp.precision_at(ranked, labels, 1) == 1.0
    assert wp.precision_at(ranked, labels, 3) == pytest.approx(2 / 3)
    with pytest.raises(ValueError):
        wp.precision_at(ranked, labels, 0)


def test_evaluate_well_separated_corpus():
    report = wp.evaluate_retrieval(small_corpus(), LABELS, "euclid")
    assert report.mean_ap == pytest.approx(1.0)
    # default cutoff is the full category size, with the query excluded
    assert report.mean_p_at == pytest.approx(2 / 3)
    for level, p in report.pr_curve:
        assert p == pytest.approx(1.0)
    for level, f in report.fr_curve:
        if level == 0.0:
            assert f == 0.0
        else:
            assert f == pytest.approx(2 * level / (1 + level))
    assert set(report.ap_by_query) == set(LABELS)


def test_evaluate_explicit_cutoff():
    report = wp.evaluate_retrieval(small_corpus(), LABELS, "euclid", cutoff=2)
    assert report.cutoff == 2
    assert report.mean_p_at == pytest.approx(1.0)


def test_evaluate_singleton_category_rejected():
    fps = dict(small_corpus())
    labels = dict(LABELS)
    labels["b2"] = "C"
    with pytest.raises(ValueError):
        wp.evaluate_retrieval(fps, labels, "euclid")


def test_evaluate_accepts_precomputed_matrix():
    fps = small_corpus()
    ids = list(fps)
    dm = wp.distance_matrix([fps[i] for i in ids], "overlap", ids=ids)
    a = wp.evaluate_retrieval(fps, LABELS, "overlap")
    b = wp.evaluate_retrieval(fps, LABELS, "overlap", matrix=dm)
    assert a.mean_ap == b.mean_ap
    assert a.pr_curve == b.pr_curve
    with pytest.raises(ValueError):
        wp.evaluate_retrieval({"a0": fps["a0"], "a1": fps["a1"]}, LABELS, "overlap", matrix=dm)


def test_recall_levels():
    assert RECALL_LEVELS == tuple(i / 10 for i in range(11))
    assert len(RECALL_LEVELS) == 11


def test_interpolated_curve_is_monotone_non_increasing():
    fps = {}
    labels = {}
    corpus = wp.build_corpus(
        wp.CorpusConfig(families=("plain", "twill-2-2", "chain-mail"), samples=6, seed=11)
    )
    for item, g in corpus.graphs.items():
        fps[item] = wp.fingerprint(g, 3)
        labels[item] = corpus.labels[item]
    report = wp.evaluate_retrieval(fps, labels, "jaccard")
    precisions = [p for _, p in report.pr_curve]
    assert all(x >= y - 1e-12 for x, y in zip(precisions, precisions[1:]))
    assert 0.0 <= report.mean_ap <= 1.0


def test_tfidf_retrieval_threads_stats():
    fps = small_corpus()
    stats = wp.corpus_stats(fps.values())
    ranked = wp.rank(fps, "a0", "cos-tfidf", stats=stats)
    assert [item for item, _ in ranked.items][0] == "a1"
    report = wp.evaluate_retrieval(fps, LABELS, "cos-tfidf", stats=stats)
    assert report.mean_ap == pytest.approx(1.0)
