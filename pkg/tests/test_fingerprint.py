"""Neighbourhood walks and fingerprints against hand-computed references."""

import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

import weaveprint as wp
from weaveprint.fingerprint import EdgeLabel

from oracles import naive_fingerprint, random_valid_rows, rows_of


def key(code: str):
    return wp.parse_neighbourhood_code(code)


def codes(fp: wp.Fingerprint) -> Counter:
    return Counter({nb.code(): c for nb, c in fp.neighbourhoods()})


def test_square_swatch_fingerprint(square_swatch):
    fp = wp.fingerprint(square_swatch, 1)
    assert fp.counts == {key("[a|t][a|t]"): 4}
    assert fp.total == 4
    assert len(fp) == 1


def test_twist_chain_fingerprint(twist_chain):
    fp = wp.fingerprint(twist_chain, 1)
    assert fp.counts == {key("[a|n][a|n]"): 2, key("[a|t][a|t]"): 2}


def test_twist_chain_depth_two_neighbourhoods(twist_chain):
    assert wp.neighbourhood(twist_chain, 0, 2).code() == "[at|na][at|na]"
    assert wp.neighbourhood(twist_chain, 1, 2).code() == "[at|na][at|na]"
    assert wp.neighbourhood(twist_chain, 2, 2).code() == "[an|t-][an|t-]"
    assert wp.neighbourhood(twist_chain, 3, 2).code() == "[an|t-][an|t-]"


def test_padding_after_terminal(square_swatch):
    nb = wp.neighbourhood(square_swatch, 0, 3)
    assert nb.code() == "[at-|t--][at-|t--]"


def test_walks_sorted_within_pairs(twist_chain):
    for c in range(twist_chain.crossing_count):
        nb = wp.neighbourhood(twist_chain, c, 3)
        assert nb.top[0] <= nb.top[1]
        assert nb.bottom[0] <= nb.bottom[1]


def test_total_always_matches_crossing_count():
    g = wp.generate("twill-2-2", 6, 9, 3)
    for k in (1, 2, 5):
        fp = wp.fingerprint(g, k)
        assert fp.total == g.crossing_count == 54


def test_closed_loops_walk_forever():
    # two closed threads crossing twice; no walk ever terminates
    g = wp.TextileGraph([5, 4, 7, 6, 1, 0, 3, 2])
    fp = wp.fingerprint(g, 6)
    assert fp.counts == {key("[nnnnnn|nnnnnn][nnnnnn|nnnnnn]"): 2}


def test_plain_weave_keys_by_region():
    # 8x8: corners see two terminals, edges one, the interior none; on an
    # even square the two one-terminal layer variants split evenly
    rows = cols = 8
    fp = wp.fingerprint(wp.generate("plain", rows, cols, 0), 1)
    expected = {
        key("[a|t][a|t]"): 4,
        key("[a|a][a|t]"): 12,
        key("[a|t][a|a]"): 12,
        key("[a|a][a|a]"): (rows - 2) * (cols - 2),
    }
    assert fp.counts == expected


def test_depth_must_be_positive(square_swatch):
    with pytest.raises(ValueError):
        wp.fingerprint(square_swatch, 0)
    with pytest.raises(ValueError):
        wp.neighbourhood(square_swatch, 0, 0)


def test_crossing_out_of_range(square_swatch):
    with pytest.raises(ValueError):
        wp.neighbourhood(square_swatch, 4, 1)


def test_edge_label(twist_chain):
    # node 0 links top to bottom, node 1 stays on top, node 8 is cut
    assert wp.edge_label(twist_chain, 0) == EdgeLabel.ALTERNATING
    assert wp.edge_label(twist_chain, 1) == EdgeLabel.STRAIGHT
    assert wp.edge_label(twist_chain, 8) == EdgeLabel.TERMINATED


def test_code_round_trip(twist_chain):
    for c in range(twist_chain.crossing_count):
        nb = wp.neighbourhood(twist_chain, c, 4)
        assert wp.parse_neighbourhood_code(nb.code()) == nb


@pytest.mark.parametrize(
    "bad", ["", "[a|a]", "[a|a][a]", "[ab|aa][aa|aa]", "[a|aa][a|a]", "aaaa"]
)
def test_code_parse_rejects_malformed(bad):
    with pytest.raises(ValueError):
        wp.parse_neighbourhood_code(bad)


def test_fingerprint_equality(square_swatch, twist_chain):
    assert wp.fingerprint(square_swatch, 2) == wp.fingerprint(square_swatch, 2)
    assert wp.fingerprint(square_swatch, 2) != wp.fingerprint(square_swatch, 3)
    assert wp.fingerprint(square_swatch, 1) != wp.fingerprint(twist_chain, 1)


@settings(max_examples=50, deadline=None)
@given(
    st.integers(min_value=0, max_value=10**9),
    st.integers(min_value=1, max_value=5),
)
def test_matches_naive_oracle(seed, k):
    rows = random_valid_rows(random.Random(seed))
    g = wp.TextileGraph([p for row in rows for p in row])
    assert codes(wp.fingerprint(g, k)) == naive_fingerprint(rows_of(g), k)
