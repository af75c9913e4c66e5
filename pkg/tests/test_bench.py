import pytest

from weaveprint.bench import BenchRow, doubling_ratios, run_bench


def test_run_bench_row_shape():
    rows = run_bench(sizes=(120, 240), ks=(1, 2), measures=("ham-bool",),
                     runs=1, matrix_items=4)
    assert len(rows) == 4
    seen = {(r.size, r.k) for r in rows}
    assert seen == {(120, 1), (120, 2), (240, 1), (240, 2)}
    for row in rows:
        assert row.measure == "ham-bool"
        assert row.fingerprint_s > 0
        assert row.matrix_s > 0


def test_run_bench_validates_inputs():
    with pytest.raises(ValueError):
        run_bench(sizes=(), ks=(2,), measures=("jaccard",))
    with pytest.raises(ValueError):
        run_bench(sizes=(100,), ks=(0,), measures=("jaccard",))
    with pytest.raises(ValueError):
        run_bench(sizes=(100,), ks=(2,), measures=("nope",))
    with pytest.raises(ValueError):
        run_bench(sizes=(100,), ks=(2,), measures=("jaccard",), matrix_items=1)


def _row(size, k, fp, mat=1.0, measure="jaccard"):
    return BenchRow(size, k, measure, fp, mat)


def test_doubling_ratios_exact():
    rows = [
        _row(1000, 2, 1.0), _row(2000, 2, 2.0), _row(4000, 2, 4.4),
        _row(1000, 4, 1.8), _row(2000, 4, 3.6), _row(4000, 4, 7.2),
    ]
    ratios = doubling_ratios(rows)
    assert ratios["size"] == pytest.approx([2.0, 2.0, 2.2, 2.0])
    assert ratios["k"] == pytest.approx([1.8, 1.8, 7.2 / 4.4])


def test_doubling_ratios_skips_non_double_steps():
    rows = [_row(1000, 2, 1.0), _row(3000, 2, 9.0), _row(1000, 3, 2.0)]
    ratios = doubling_ratios(rows)
    assert ratios["size"] == []
    assert ratios["k"] == []


def test_doubling_ratios_ignores_duplicate_measures():
    # fingerprint time does not depend on the measure; rows repeat per measure
    rows = [
        _row(1000, 2, 1.0, measure="jaccard"),
        _row(1000, 2, 1.0, measure="euclid"),
        _row(2000, 2, 2.0, measure="jaccard"),
        _row(2000, 2, 2.0, measure="euclid"),
    ]
    assert doubling_ratios(rows)["size"] == pytest.approx([2.0])
