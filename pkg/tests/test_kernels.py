import importlib
import os

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cei_ground import _kernels_py, kernels
from oracles import bounded_exponents, inversion_sign

BACKENDS = [_kernels_py]
try:
    BACKENDS.append(importlib.import_module("cei_ground._kernels"))
except ImportError:
    pass


@pytest.fixture(params=BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def backend(request):
    return request.param


def test_selector_reports_backend():
    assert kernels.BACKEND in ("python", "cython")
    if len(BACKENDS) == 2 and not os.environ.get("CEI_GROUND_PURE"):
        assert kernels.BACKEND == "cython"
    if os.environ.get("CEI_GROUND_PURE"):
        assert kernels.BACKEND == "python"


@given(st.integers(0, 5), st.integers(0, 3), st.integers(-1, 8))
def test_bounded_exponents_matches_filtered_product(n, depth, total):
    want = bounded_exponents(n, depth, total)
    for mod in BACKENDS:
        assert mod.bounded_exponents(n, depth, total) == want


@given(st.lists(st.booleans(), max_size=10).flatmap(
    lambda par: st.tuples(st.just(par), st.permutations(list(range(len(par)))))))
def test_koszul_sign_matches_bubble_sort(case):
    par, order = case
    want = inversion_sign(par, order)
    for mod in BACKENDS:
        assert mod.koszul_sort_sign(par, list(order)) == want


def test_koszul_sign_examples(backend):
    assert backend.koszul_sort_sign([1, 1], [1, 0]) == -1
    assert backend.koszul_sort_sign([1, 0, 1], [2, 1, 0]) == -1
    assert backend.koszul_sort_sign([0, 1], [1, 0]) == 1
    assert backend.koszul_sort_sign([], []) == 1
