import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cei_ground import stable_graphs as sg
from oracles import brute_automorphisms, naive_graph_count

SLOTS = [(0, 3), (0, 4), (0, 5), (1, 1), (1, 2), (1, 3), (2, 0), (2, 1)]


@pytest.mark.parametrize("g,n", SLOTS)
def test_counts_match_naive_oracle(g, n):
    assert len(sg.enumerate_stable_graphs(g, n)) == naive_graph_count(g, n)


def test_anchor_counts():
    assert [len(sg.enumerate_stable_graphs(*t)) for t in [(0, 3), (1, 1), (0, 4), (1, 2)]] == [1, 2, 4, 5]


@pytest.mark.parametrize("g,n", [(1, 1), (0, 4), (1, 2), (2, 1)])
def test_graphs_are_valid_canonical_and_distinct(g, n):
    graphs = sg.enumerate_stable_graphs(g, n)
    assert len({sg.encoding(G) for G in graphs}) == len(graphs)
    for G in graphs:
        assert sg.check_graph(G) == []
        assert sg.is_canonical(G)
        assert G.g == g and G.n == n
        assert sg.automorphism_order(G) == brute_automorphisms(G)


def _relabel(G, perm):
    return sg.make_graph(G.genus, [[perm[h] for h in hs] for hs in G.vhalf],
                         [perm[h] for h in G.legs], [(perm[a], perm[b]) for a, b in G.edges])


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(sg.enumerate_stable_graphs(1, 3) + sg.enumerate_stable_graphs(2, 1)), st.randoms())
def test_canonical_form_ignores_half_edge_names(G, rnd):
    hs = G.half_edges()
    img = list(hs)
    rnd.shuffle(img)
    H = _relabel(G, dict(zip(hs, img)))
    # shuffle vertex order too
    order = list(range(H.nv))
    rnd.shuffle(order)
    H = sg.make_graph([H.genus[v] for v in order], [H.vhalf[v] for v in order], H.legs, H.edges)
    assert sg.encoding(sg.canonicalize(H)) == sg.encoding(G)


def test_text_round_trip():
    for G in sg.enumerate_stable_graphs(1, 3):
        assert sg.from_text(sg.to_text(G)) == G


def test_contraction_chains():
    assert len(sg.enumerate_contraction_chains(0, 4, 1)) == 3
    assert len(sg.enumerate_contraction_chains(0, 4, 0)) == 4


def test_contracting_all_edges_gives_the_star():
    rng = random.Random(3)
    for G in sg.enumerate_stable_graphs(1, 2):
        E = list(range(len(G.edges)))
        rng.shuffle(E)
        C = sg.contract_edges(G, E)
        assert sg.encoding(sg.canonicalize(C.target)) == sg.encoding(sg.star(1, 2))


def test_unstable_type_is_rejected():
    with pytest.raises(ValueError):
        sg.enumerate_stable_graphs(0, 2)
