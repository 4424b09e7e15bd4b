import pytest

from cei_ground import operad_fixture as of
from cei_ground import resolution as rs
from cei_ground import stable_graphs as sg


def one_edge(g, n):
    return [G for G in sg.enumerate_stable_graphs(g, n) if len(G.edges) == 1]


@pytest.mark.parametrize("g,n", [(1, 1), (0, 4), (1, 2)])
def test_retract(g, n):
    for G in sg.enumerate_stable_graphs(g, n):
        c = rs.retract_check(G, of.trivial_fixture(), 0)
        assert c.ok, c.witness


def test_wrong_homotopy_sign_breaks_the_retract(monkeypatch):
    G = one_edge(1, 1)[0]
    orig = rs.homotopy_h
    monkeypatch.setattr(rs, "homotopy_h", lambda cell: {k: -v for k, v in orig(cell).items()})
    assert not rs.retract_check(G, of.trivial_fixture(), 0).ok


def test_total_differential_squares_to_zero():
    F = of.torus_fixture()
    for G in one_edge(1, 1) + one_edge(0, 4)[:1]:
        keys = [(0,), (1,), (3,)] if G.nv == 1 else [(0, 1), (5, 3)]
        for c in (rs.check_total_d_squared(G, F, 1, keys), rs.check_delta2_chain_map(G, F, 1, keys)):
            assert c.ok, (c.name, c.witness)


def test_transferred_differential_is_the_feynman_one():
    F = of.torus_fixture()
    G = one_edge(1, 1)[0]
    rep = rs.perturbed_differential(G, F, 1, [(0,), (2,), (3,)])
    assert rep.ok, [(c.name, c.witness) for c in (rep.differential, rep.i_chain, rep.pi_chain, rep.retraction)]


def test_edge_term_is_twisted_sewing():
    F = of.torus_fixture()
    G = one_edge(1, 1)[0]
    ks = {h: 0 for h in G.half_edges()}
    nonzero = 0
    for a in range(F.dim(0, 3)):
        e = rs.edge_term(F, G, (a,), ks)
        assert e == rs.sewing_term(F, G, (a,), ks)
        nonzero += bool(e)
    assert nonzero


def test_large_graphs_rejected():
    G = max(sg.enumerate_stable_graphs(2, 1), key=lambda G: len(G.edges))
    assert len(G.edges) == 4
    with pytest.raises(rs.RejectedInput):
        rs.retract_check(G, of.trivial_fixture(), 0)
