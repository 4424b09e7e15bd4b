from fractions import Fraction
from math import factorial

from hypothesis import given, settings
from hypothesis import strategies as st

from cei_ground import cei as ce
from cei_ground import intersection as it


def test_vertex_coefficient_of_the_three_point_term():
    assert ce.string_vertex_coefficient(0, (0, 0, 0)) == Fraction(1, 6)
    assert ce.cei_record(0, (0, 0, 0), vertex_coefficient=True)["value"] == "1/6"


def test_record_flags_off_dimension():
    rec = ce.cei_record(2, (0, 0))
    assert rec["value"] == "0" and rec["dimension_ok"] is False


def test_aut_multiplicity():
    assert ce.aut_multiplicity((0, 0, 1)) == 2
    assert ce.aut_multiplicity((1, 1, 1, 2, 2)) == 12


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2), st.integers(1, 5))
def test_series_coefficients(g, n):
    if 2 * g - 2 + n <= 0:
        return
    series = ce.mc_pushforward_series(g, n)
    for ks in it.on_dimension_vectors(g, n):
        assert ce.q_derivative(series, ks) == it.psi_intersection(g, ks)
        assert ce.cei_point(g, ks) == factorial(n) * ce.string_vertex_coefficient(g, ks)
