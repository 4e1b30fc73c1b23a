import numpy as np
import pytest

from oracles import rca_by_shares
from productspace.errors import EmptyInputError
from productspace.ingest import ExportMatrix, load_trade
from productspace.specialization import (
    RcaMatrix,
    binarize,
    rca,
    read_rca,
    region_rca,
    reindex,
    write_rca,
)


def em(values, countries=None, products=None):
    values = np.asarray(values, dtype=float)
    countries = countries or tuple(f"C{i:02d}" for i in range(values.shape[0]))
    products = products or tuple(f"{j:04d}" for j in range(values.shape[1]))
    return ExportMatrix(countries, products, values)


def test_uniform_matrix_is_one():
    r = rca(em(np.full((4, 5), 7.0)))
    np.testing.assert_array_equal(r.values, np.ones((4, 5)))


def test_two_by_two_hand_values():
    r = rca(em([[10, 0], [10, 10]]))
    oracle = rca_by_shares([[10, 0], [10, 10]])
    assert oracle[0][0] == 1.5 and oracle[1][1] == 1.5
    np.testing.assert_allclose(r.values, oracle, rtol=1e-15)
    assert r.values[0, 0] == 1.5
    assert r.values[1, 1] == 1.5


def test_matches_share_oracle_on_random(rng):
    x = rng.integers(0, 50, size=(7, 9)).astype(float)
    np.testing.assert_allclose(rca(em(x)).values, rca_by_shares(x.tolist()), rtol=1e-12)


def test_zero_row_and_column():
    r = rca(em([[0, 0, 0], [1, 2, 0], [3, 1, 0]]))
    assert not r.values[0].any()
    assert not r.values[:, 2].any()
    assert np.isfinite(r.values).all()


def test_all_zero_raises():
    with pytest.raises(EmptyInputError):
        rca(em(np.zeros((2, 2))))


def test_binarize_tie_and_thresholds():
    r = RcaMatrix(("A",), ("0001", "0002", "0003"), [[1.5, 1.0, 0.49]])
    assert binarize(r, 1.0).bits.tolist() == [[True, False, False]]
    assert binarize(r, 0.5).bits.tolist() == [[True, True, False]]
    with pytest.raises(ValueError):
        binarize(r, 0.0)


def test_every_exported_product_has_some_rca_at_least_one(rng):
    x = rng.random((6, 8)) * (rng.random((6, 8)) < 0.6)
    x[0, :] += 0.01
    r = rca(em(x))
    assert (r.values.max(axis=0) >= 1 - 1e-12).all()


def test_write_read_round_trip(tmp_path, tiny_trade):
    r = rca(load_trade(tiny_trade, 2000))
    path = write_rca(r, tmp_path / "rca.csv", threshold=1.0)
    text = path.read_text().splitlines()
    assert text[0] == "country,sitc4,rca,bit"
    assert "AAA,0012,1,0" in text  # RCA exactly 1 is not specialized
    back = read_rca(path)
    assert back.countries == r.countries and back.products == r.products
    np.testing.assert_allclose(back.values, r.values, rtol=1e-11)


def test_region_rca_against_world():
    m = em([[10, 0], [0, 10], [5, 5]], countries=("A", "B", "C"))
    r = region_rca(m, {"AB": {"A", "B"}, "solo": {"C"}})
    # both regions mirror the world's 50/50 mix
    np.testing.assert_allclose(r.values, np.ones((2, 2)))
    r = region_rca(m, {"A": {"A"}})
    np.testing.assert_allclose(r.values, [[2.0, 0.0]])


def test_reindex_fills_zero():
    r = RcaMatrix(("A",), ("0002",), [[3.0]])
    out = reindex(r, ("0001", "0002"))
    assert out.values.tolist() == [[0.0, 3.0]]
