"""Categorical enumerative invariants of the ground field.

The invariants are computed through their identification with psi numbers:
<u^k1 ... u^kn>_g = n! * v_{g,n}^{k1..kn} = <tau_k1 ... tau_kn>_g.
"""
from __future__ import annotations

from collections import Counter
from fractions import Fraction
from math import factorial

from .intersection import dimension_ok, format_rational, on_dimension_vectors, psi_intersection


def _validate(g: int, ks) -> tuple:
    ks = tuple(int(k) for k in ks)
    if g < 0 or not ks or any(k < 0 for k in ks) or 2 * g - 2 + len(ks) <= 0:
        raise ValueError(f"unstable or malformed query g={g} ks={ks}")
    return ks


def cei_point(g: int, ks) -> Fraction:
    ks = _validate(g, ks)
    if not dimension_ok(g, ks):
        return Fraction(0)
    return psi_intersection(g, ks)


def string_vertex_coefficient(g: int, ks) -> Fraction:
    ks = _validate(g, ks)
    return cei_point(g, ks) / factorial(len(ks))


def aut_multiplicity(ks) -> int:
    out = 1
    for m in Counter(ks).values():
        out *= factorial(m)
    return out


def mc_pushforward_series(g: int, n: int) -> dict:
    """Coefficients of q_k1 ... q_kn in the push-forward generating expression."""
    if 2 * g - 2 + n <= 0:
        raise ValueError("unstable (g, n)")
    out = {}
    for ks in on_dimension_vectors(g, n):
        out[ks] = string_vertex_coefficient(g, ks) * factorial(n) / aut_multiplicity(ks)
    return out


def q_derivative(series: dict, ls) -> Fraction:
    """Apply d/dq_l1 ... d/dq_ln to a homogeneous degree-n series."""
    key = tuple(sorted(ls))
    coeff = series.get(key, Fraction(0))
    # d^n/dq... of prod q_k^{m_k} / (no factor) picks up prod m_k!
    return coeff * aut_multiplicity(key)


def cei_record(g: int, ks, vertex_coefficient: bool = False) -> dict:
    ks = _validate(g, ks)
    value = string_vertex_coefficient(g, ks) if vertex_coefficient else cei_point(g, ks)
    return {"g": g, "ks": list(ks), "value": format_rational(value),
            "dimension_ok": dimension_ok(g, ks)}
