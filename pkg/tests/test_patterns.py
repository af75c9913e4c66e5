"""Family builders: validity, determinism, geometry invariances."""

import pytest

import weaveprint as wp
from weaveprint.patterns import GraphBuilder, ThreadPathError


@pytest.mark.parametrize("family", wp.FAMILY_NAMES)
def test_families_build_valid_graphs(family):
    for seed in (0, 11):
        g = wp.generate(family, 12, 10, seed)
        assert wp.validate(g).ok
        assert g.label == family
        assert g.crossing_count > 0


@pytest.mark.parametrize("family", wp.FAMILY_NAMES)
def test_crossing_budget_is_respected(family):
    budget = 20 * 18
    g = wp.generate(family, 20, 18, 5)
    assert 0.5 * budget <= g.crossing_count <= 1.6 * budget


def test_grid_families_hit_budget_exactly():
    for family in ("plain", "twill-2-2", "satin", "warp-above", "andean"):
        assert wp.generate(family, 9, 14, 3).crossing_count == 9 * 14


def test_generate_is_deterministic():
    for family in wp.FAMILY_NAMES:
        a = wp.generate(family, 10, 10, 42)
        b = wp.generate(family, 10, 10, 42)
        assert a == b


def test_seed_matters_for_seeded_families():
    assert wp.generate("viet-weave", 14, 14, 1) != wp.generate("viet-weave", 14, 14, 2)
    assert wp.generate("andean", 12, 12, 1) != wp.generate("andean", 12, 12, 2)


def test_unknown_family():
    with pytest.raises(ValueError):
        wp.generate("tartan", 5, 5, 0)


def test_bad_budget():
    with pytest.raises(ValueError):
        wp.generate("plain", 0, 5, 0)


def test_smallest_swatch_fingerprint():
    fp = wp.fingerprint(wp.generate("plain", 2, 2, 123), 1)
    assert fp.counts == {wp.parse_neighbourhood_code("[a|t][a|t]"): 4}


def test_builder_rejects_consecutive_same_crossing():
    b = GraphBuilder(2)
    with pytest.raises(ThreadPathError):
        b.thread([(0, True), (0, False)])


def test_builder_rejects_lane_reuse():
    b = GraphBuilder(2)
    b.thread([(0, True), (1, True)])
    with pytest.raises(ThreadPathError):
        b.thread([(1, True), (0, False)])


def test_builder_rejects_unvisited_lanes():
    b = GraphBuilder(2)
    b.thread([(0, True), (1, True)])
    with pytest.raises(ThreadPathError):
        b.build()


def test_weave_rejects_ragged_matrix():
    with pytest.raises(ValueError):
        wp.weave_from_layers([[True, False], [True]])


def _twill_layers(rows, cols):
    return [[(j - i) % 3 < 2 for j in range(cols)] for i in range(rows)]


def test_mirrored_weave_has_equal_fingerprint():
    rows, cols = 9, 12
    layers = _twill_layers(rows, cols)
    mirrored = [list(reversed(row)) for row in layers]
    for k in (1, 2, 3, 4):
        assert wp.fingerprint(wp.weave_from_layers(layers), k) == wp.fingerprint(
            wp.weave_from_layers(mirrored), k
        )


def test_rotated_weave_has_equal_fingerprint():
    # quarter turn: wefts become warps, so the layer matrix transposes and
    # inverts
    rows, cols = 9, 12
    layers = _twill_layers(rows, cols)
    rotated = [[not layers[rows - 1 - j][i] for j in range(rows)] for i in range(cols)]
    for k in (1, 2, 3, 4):
        assert wp.fingerprint(wp.weave_from_layers(layers), k) == wp.fingerprint(
            wp.weave_from_layers(rotated), k
        )


def test_concat_offsets_peers():
    a = wp.generate("plain", 2, 2, 0)
    b = wp.generate("plain", 2, 3, 0)
    both = wp.concat_graphs([a, b])
    assert both.crossing_count == a.crossing_count + b.crossing_count
    assert wp.validate(both).ok
    fa = wp.fingerprint(a, 2).counts
    fb = wp.fingerprint(b, 2).counts
    merged = dict(fa)
    for key, c in fb.items():
        merged[key] = merged.get(key, 0) + c
    assert wp.fingerprint(both, 2).counts == merged


def test_chain_mail_is_terminal_rich():
    mail = wp.generate("chain-mail", 16, 16, 0)
    weave = wp.generate("plain", 16, 16, 0)
    assert mail.terminal_count / mail.node_count > 2 * (
        weave.terminal_count / weave.node_count
    )
