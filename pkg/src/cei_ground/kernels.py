"""Integer kernels: the compiled extension when importable, else the pure-Python fallback.

Set CEI_GROUND_PURE=1 to force the fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
koszul_sort_sign = _kernels_py.koszul_sort_sign
bounded_exponents = _kernels_py.bounded_exponents

if not os.environ.get("CEI_GROUND_PURE"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        koszul_sort_sign = _compiled.koszul_sort_sign
        bounded_exponents = _compiled.bounded_exponents
        BACKEND = "cython"
