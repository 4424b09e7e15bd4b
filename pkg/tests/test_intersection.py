from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cei_ground import intersection as it
from oracles import genus0_closed


def test_anchors():
    assert it.psi_intersection(0, (0, 0, 0)) == 1
    assert it.psi_intersection(1, (1,)) == Fraction(1, 24)
    assert it.psi_intersection(2, (4,)) == Fraction(1, 1152)
    assert it.psi_intersection(1, (1, 1)) == Fraction(1, 24)
    assert it.psi_intersection(2, (2, 3)) == Fraction(29, 5760)


def test_symmetric_in_insertions():
    assert it.psi_intersection(2, (1, 4, 0)) == it.psi_intersection(2, (0, 1, 4))


@pytest.mark.parametrize("n", range(3, 9))
def test_genus_zero_against_multinomial(n):
    for ks in it.on_dimension_vectors(0, n):
        assert it.psi_intersection(0, ks) == genus0_closed(ks)
        assert it.psi_intersection(0, ks, "genus0_closed") == genus0_closed(ks)


vectors = st.integers(0, 3).flatmap(
    lambda g: st.integers(max(1, 3 - 2 * g), 6).flatmap(
        lambda n: st.sampled_from(list(it.on_dimension_vectors(g, n))).map(lambda ks: (g, ks))))


@settings(max_examples=60, deadline=None)
@given(vectors)
def test_string_and_dilaton_equations(case):
    g, ks = case
    assert it.check_string_equation(g, ks + (0,))
    assert it.check_dilaton_equation(g, ks + (1,))


@settings(max_examples=60, deadline=None)
@given(vectors)
def test_engines_agree_where_applicable(case):
    g, ks = case
    ref = it.psi_intersection(g, ks, "dvv")
    if it.reducible(g, ks):
        assert it.psi_intersection(g, ks, "string_dilaton") == ref


def test_off_dimension_is_zero():
    assert it.psi_intersection(1, (0,)) == 0
    assert it.psi_intersection(2, (1, 1)) == 0


@pytest.mark.parametrize("g,ks", [(0, (0,)), (0, (0, 0)), (-1, (1,)), (1, ()), (1, (-1,))])
def test_rejects_unstable_or_malformed(g, ks):
    with pytest.raises(ValueError):
        it.psi_intersection(g, ks)


def test_unsupported_methods():
    with pytest.raises(it.UnsupportedMethod):
        it.psi_intersection(1, (1,), "genus0_closed")
    with pytest.raises(it.UnsupportedMethod):
        it.psi_intersection(0, (0, 0, 0), "nope")


def test_memo_round_trip(tmp_path):
    it.psi_intersection(3, (2, 2, 2, 2))
    path = tmp_path / "memo.json"
    it.MEMO.dump(path)
    fresh = it.MemoTable()
    fresh.load(path)
    assert fresh.items() == it.MEMO.items()


def test_format_rational():
    assert it.format_rational(Fraction(1, 24)) == "1/24"
    assert it.format_rational(Fraction(-3)) == "-3"
