"""Sparse exact linear algebra over Q.

Vectors are dicts {basis key: coefficient}; zero entries are never stored.
Coefficients may be int or Fraction.
"""
from __future__ import annotations

from fractions import Fraction


def add_into(acc: dict, vec: dict, scale=1) -> dict:
    for k, c in vec.items():
        v = acc.get(k, 0) + scale * c
        if v:
            acc[k] = v
        else:
            acc.pop(k, None)
    return acc


def add_term(acc: dict, key, c) -> None:
    if not c:
        return
    v = acc.get(key, 0) + c
    if v:
        acc[key] = v
    else:
        del acc[key]


def scale(vec: dict, s) -> dict:
    if not s:
        return {}
    return {k: s * c for k, c in vec.items()}


def apply_columns(cols, vec: dict) -> dict:
    """Apply a map given as a list of sparse columns to a sparse vector over ints."""
    out = {}
    for j, c in vec.items():
        for i, a in cols[j]:
            add_term(out, i, a * c)
    return out


def rank(rows: list) -> int:
    """Rank of a list of sparse row dicts (Gaussian elimination over Q)."""
    return len(_echelon([dict(r) for r in rows])[0])


def _echelon(rows: list):
    pivots = {}           # pivot column -> normalised row
    order = []
    for r in rows:
        r = {k: Fraction(v) for k, v in r.items() if v}
        for p in order:
            if p in r:
                add_into(r, pivots[p], -r[p])
        if not r:
            continue
        p = min(r)
        inv = 1 / r[p]
        r = {k: v * inv for k, v in r.items()}
        for q in order:
            if p in pivots[q]:
                add_into(pivots[q], r, -pivots[q][p])
        pivots[p] = r
        order.append(p)
    return order, pivots


def solve(columns: dict, target: dict):
    """Solve sum_j x_j * columns[j] = target exactly.

    columns maps an unknown's key to its sparse image vector.  Returns a dict
    of unknown values (a particular solution with the fewest free unknowns
    used, chosen by deterministic pivoting on sorted keys) or None when the
    system is inconsistent.
    """
    keys = sorted(columns)
    # eliminate on the augmented system, one row per target coordinate
    coords = set(target)
    for k in keys:
        coords.update(columns[k])
    rows = []
    for c in sorted(coords, key=repr):
        row = {}
        for idx, k in enumerate(keys):
            v = columns[k].get(c)
            if v:
                row[idx] = Fraction(v)
        rhs = Fraction(target.get(c, 0))
        if rhs:
            row[len(keys)] = rhs
        if row:
            rows.append(row)
    order, pivots = _echelon(rows)
    if len(keys) in pivots:
        return None
    sol = {}
    for p in order:
        val = pivots[p].get(len(keys), 0)
        if val:
            sol[keys[p]] = val
    return sol
