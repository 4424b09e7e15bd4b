import pytest

from cei_ground import feynman as fy
from cei_ground import operad_fixture as of


@pytest.fixture(scope="module")
def torus():
    return of.torus_fixture()


def test_homotopy_quotient_homology(torus):
    # classes of 1 and tau survive on the torus fixture; only 1 with the disk
    assert fy.homotopy_quotient(torus, 1, 1, 3).homology() == {0: 1, 1: 1}
    assert fy.homotopy_quotient(of.disk_fixture(), 1, 1, 3).homology() == {0: 1}


@pytest.mark.parametrize("g,n,W", [(0, 3, 4), (1, 1, 4), (0, 4, 4), (1, 2, 3)])
def test_d_squared(torus, g, n, W):
    r = fy.check_d_squared(fy.FPSpace(torus, g, n, 2, W))
    assert r.ok, r.witness
    assert r.checked > 0


def test_loop_and_pair_chain_maps(torus):
    r = fy.check_loop_chain_map(fy.FPSpace(torus, 0, 4, 2, 4), fy.FPSpace(torus, 1, 2, 2, 4), 1, 2)
    assert r.ok, r.witness
    s03 = fy.FPSpace(torus, 0, 3, 2, 4)
    r = fy.check_pair_chain_map(s03, 2, s03, 1, fy.FPSpace(torus, 0, 4, 2, 4))
    assert r.ok, r.witness


def test_coinvariance(torus):
    r = fy.check_coinvariance(fy.FPSpace(torus, 0, 4, 2, 4))
    assert r.ok, r.witness


def test_differential_lowers_degree_by_one(torus):
    space = fy.FPSpace(torus, 1, 1, 2, 3)
    basis, cols = fy.differential_matrix(space)
    for t in basis:
        assert all(space.degree(s) == space.degree(t) - 1 for s in cols[t])
