"""Exact psi-class intersection numbers <tau_k1 ... tau_kn>_g.

Normalisation: <tau_0^3>_0 = 1.  The default engine is the DVV (Virasoro)
recursion; two independent engines (string/dilaton reduction and the genus-0
closed formula) exist for cross-checking.
"""
from __future__ import annotations

import itertools
import json
import os
import threading
from fractions import Fraction
from math import factorial

METHODS = ("default", "dvv", "string_dilaton", "genus0_closed")


class UnsupportedMethod(ValueError):
    pass


def _dfact(m: int) -> int:
    # (2r-1)!! style double factorial with (-1)!! = 1
    out = 1
    while m > 1:
        out *= m
        m -= 2
    return out


def dimension_ok(g: int, ks) -> bool:
    return sum(ks) == 3 * g - 3 + len(ks)


def _check_query(g: int, ks) -> tuple:
    ks = tuple(int(k) for k in ks)
    if g < 0 or any(k < 0 for k in ks):
        raise ValueError("genus and exponents must be nonnegative")
    if not ks:
        raise ValueError("at least one insertion is required")
    if 2 * g - 2 + len(ks) <= 0:
        raise ValueError(f"unstable query (g={g}, n={len(ks)})")
    return ks


class MemoTable:
    """Map (g, sorted ks) -> Fraction.  Reads are lock-free, writes serialised."""

    def __init__(self):
        self._data = {}
        self._lock = threading.Lock()

    def get(self, key):
        return self._data.get(key)

    def put(self, key, value):
        with self._lock:
            self._data.setdefault(key, value)

    def clear(self):
        with self._lock:
            self._data.clear()

    def __len__(self):
        return len(self._data)

    def items(self):
        return sorted(self._data.items())

    def dump(self, path):
        rows = [[g, list(ks), f"{v.numerator}/{v.denominator}"] for (g, ks), v in self.items()]
        tmp = f"{path}.tmp"
        with open(tmp, "w") as fh:
            json.dump(rows, fh)
        os.replace(tmp, path)

    def load(self, path):
        with open(path) as fh:
            rows = json.load(fh)
        for g, ks, val in rows:
            self.put((g, tuple(ks)), Fraction(val))


MEMO = MemoTable()


def _dvv(g: int, ks: tuple) -> Fraction:
    if not dimension_ok(g, ks):
        return Fraction(0)
    key = (g, ks)
    hit = MEMO.get(key)
    if hit is not None:
        return hit
    if g == 0 and ks == (0, 0, 0):
        value = Fraction(1)
    else:
        # peel off the largest insertion tau_{k+1}
        k = ks[-1] - 1
        rest = ks[:-1]
        total = Fraction(0)
        for j, kj in enumerate(rest):
            if k + kj < 0:
                continue
            coeff = Fraction(_dfact(2 * k + 2 * kj + 1), _dfact(2 * kj - 1))
            total += coeff * _get(g, rest[:j] + rest[j + 1:] + (k + kj,))
        if k >= 1:
            half = Fraction(0)
            for r in range(k):
                s = k - 1 - r
                w = _dfact(2 * r + 1) * _dfact(2 * s + 1)
                if g >= 1:
                    half += w * _get(g - 1, rest + (r, s))
                m = len(rest)
                for g1 in range(g + 1):
                    g2 = g - g1
                    for mask in range(2 ** m):
                        I = tuple(rest[i] for i in range(m) if mask >> i & 1)
                        J = tuple(rest[i] for i in range(m) if not mask >> i & 1)
                        if 2 * g1 - 1 + len(I) <= 0 or 2 * g2 - 1 + len(J) <= 0:
                            continue
                        a = _get(g1, I + (r,))
                        if a:
                            half += w * a * _get(g2, J + (s,))
            total += half / 2
        if k == 0 and g == 1 and not rest:
            total += Fraction(1, 8)
        value = total / _dfact(2 * k + 3)
    MEMO.put(key, value)
    return value


def _get(g: int, ks) -> Fraction:
    ks = tuple(sorted(ks))
    if 2 * g - 2 + len(ks) <= 0:
        return Fraction(0)
    return _dvv(g, ks)


def _one_point(g: int) -> Fraction:
    # <tau_{3g-2}>_g = 1 / (24^g g!)
    return Fraction(1, 24 ** g * factorial(g))


def _string_dilaton(g: int, ks: tuple) -> Fraction:
    if not dimension_ok(g, ks):
        return Fraction(0)
    n = len(ks)
    if g == 0 and ks == (0, 0, 0):
        return Fraction(1)
    if 0 in ks:
        i = ks.index(0)
        rest = ks[:i] + ks[i + 1:]
        if 2 * g - 2 + len(rest) <= 0:
            raise UnsupportedMethod("string reduction leaves an unstable type")
        total = Fraction(0)
        for j, kj in enumerate(rest):
            if kj > 0:
                total += _string_dilaton(g, tuple(sorted(rest[:j] + (kj - 1,) + rest[j + 1:])))
        return total
    if 1 in ks and 2 * g - 2 + n - 1 > 0:
        i = ks.index(1)
        rest = ks[:i] + ks[i + 1:]
        return (2 * g - 2 + len(rest)) * _string_dilaton(g, rest)
    if n == 1:
        return _one_point(g)
    raise UnsupportedMethod(f"<{ks}>_{g} is not reducible by string and dilaton")


def _genus0(g: int, ks: tuple) -> Fraction:
    if g != 0:
        raise UnsupportedMethod("genus0_closed needs g = 0")
    if not dimension_ok(0, ks):
        return Fraction(0)
    out = Fraction(factorial(len(ks) - 3))
    for k in ks:
        out /= factorial(k)
    return out


def psi_intersection(g: int, ks, method: str = "default") -> Fraction:
    ks = tuple(sorted(_check_query(g, ks)))
    if method in ("default", "dvv"):
        return _dvv(g, ks)
    if method == "string_dilaton":
        return _string_dilaton(g, ks)
    if method == "genus0_closed":
        return _genus0(g, ks)
    raise UnsupportedMethod(f"unknown method {method!r}")


def reducible(g: int, ks) -> bool:
    try:
        _string_dilaton(g, tuple(sorted(ks)))
    except UnsupportedMethod:
        return False
    return True


def check_string_equation(g: int, ks) -> bool:
    ks = tuple(ks)
    if 0 not in ks:
        return True
    i = ks.index(0)
    rest = ks[:i] + ks[i + 1:]
    if not rest or 2 * g - 2 + len(rest) <= 0:
        return True
    lhs = psi_intersection(g, ks)
    rhs = sum((psi_intersection(g, rest[:j] + (kj - 1,) + rest[j + 1:])
               for j, kj in enumerate(rest) if kj > 0), Fraction(0))
    return lhs == rhs


def check_dilaton_equation(g: int, ks) -> bool:
    ks = tuple(ks)
    if 1 not in ks:
        return True
    i = ks.index(1)
    rest = ks[:i] + ks[i + 1:]
    if not rest or 2 * g - 2 + len(rest) <= 0:
        return True
    return psi_intersection(g, ks) == (2 * g - 2 + len(rest)) * psi_intersection(g, rest)


def on_dimension_vectors(g: int, n: int):
    """All sorted k-vectors with sum 3g-3+n."""
    d = 3 * g - 3 + n
    if d < 0:
        return
    for combo in itertools.combinations_with_replacement(range(d + 1), n):
        if sum(combo) == d:
            yield combo


def table_rows(g: int, n: int) -> list:
    return [(g, n, ks, psi_intersection(g, ks)) for ks in on_dimension_vectors(g, n)]


def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
