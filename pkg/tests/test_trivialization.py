from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cei_ground import feynman as fy
from cei_ground import operad_fixture as of
from cei_ground import trivialization as tv

entry = st.integers(-3, 3)


def series(n, order):
    return st.lists(st.lists(st.lists(entry, min_size=n, max_size=n), min_size=n, max_size=n),
                    min_size=order, max_size=order)


@settings(max_examples=40, deadline=None)
@given(series(3, 6))
def test_inverse_series_to_order_six(R):
    T = tv.invert_unital_series(R, 6)
    assert tv.inversion_defect(R, T) == []


@settings(max_examples=40, deadline=None)
@given(series(2, 2))
def test_first_two_inverse_terms(R):
    T = tv.invert_unital_series(R, 2)
    R1, R2 = R
    assert T[1] == [[-Fraction(x) for x in row] for row in R1]
    assert T[2] == tv.matadd(tv.matmul(R1, R1), R2, -1)


def test_inversion_rejects_bad_input():
    with pytest.raises(ValueError):
        tv.invert_unital_series([], 2)
    with pytest.raises(ValueError):
        tv.invert_unital_series([tv.identity(2)], -1)


def test_edge_model():
    V = tv.edge_model()
    assert tv.validation_problems(V) == []
    checked, w = tv.check_edge_identity(V, 2)
    assert w is None and checked > 0


def test_edge_model_algebra_and_action():
    F = of.torus_fixture()
    A = tv.edge_model_algebra(F)
    assert tv.validate_cyclic_algebra(A, [(0, 3), (1, 1), (0, 4)]) == []
    checked, w = tv.check_action_chain_map(fy.FPSpace(F, 1, 1, 2, 3), A, tv.EdgeForm(A.V, 2))
    assert w is None and checked > 0


def test_zero_trivialization_kills_edges():
    F = of.torus_fixture()
    A = tv.edge_model_algebra(F)
    zero = tv.with_series(A.V, [tv.zeros(A.V.dim)])
    A0 = tv.CyclicAlgebra(A.fixture, zero, A.action)
    H0 = tv.EdgeForm(zero, 2)
    space = fy.FPSpace(F, 1, 1, 2, 3)
    edged = [t for t in space.basis() if space.graphs[t[0]].edges]
    assert edged
    assert all(not tv.fp_action_tensor(space, A0, H0, t) for t in edged)
