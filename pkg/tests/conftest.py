"""Shared fixtures: reference graphs and the session-wide evaluation corpus."""

from __future__ import annotations

import pytest

import weaveprint as wp

# Two threads twisting through a chain of four crossings; both thread pairs
# stay together, so the inner links alternate a / n and the chain ends in
# terminals.  Small enough to check every walk by hand.
TWIST_CHAIN_TEXT = """TG1 4
11 4 9 6
1 14 3 12
-1 2 -1 0
7 -1 5 -1
"""


@pytest.fixture
def square_swatch() -> wp.TextileGraph:
    """2x2 plain weave: four crossings, every walk ends after one link."""
    return wp.generate("plain", 2, 2, 0)


@pytest.fixture
def twist_chain() -> wp.TextileGraph:
    return wp.parse(TWIST_CHAIN_TEXT)


def _build_eval_corpus():
    cfg = wp.CorpusConfig(seed=7)
    corpus = wp.build_corpus(cfg)
    return corpus


@pytest.fixture(scope="session")
def eval_corpus() -> wp.Corpus:
    """Desk-scale labelled corpus shared by the evaluation tests."""
    return _build_eval_corpus()


@pytest.fixture(scope="session")
def eval_fingerprints(eval_corpus):
    """Fingerprints of the evaluation corpus at the depths the tests use."""
    out = {}
    for k in (2, 3, 4):
        out[k] = {item: wp.fingerprint(g, k) for item, g in eval_corpus.graphs.items()}
    return out
