"""Acceptance criteria 1-10.

Each criterion is a function returning (ok, detail).  Under pytest every
criterion is one test and the terminal summary prints one line per criterion;
run this file directly to get the same lines without pytest.
"""
import random
import sys
import time
from fractions import Fraction
from math import factorial

import pytest

from cei_ground import cei as ce
from cei_ground import dgla as dl
from cei_ground import intersection as it
from cei_ground import stable_graphs as sg
from cei_ground import suites
from cei_ground import trivialization as tv

sys.path.insert(0, __file__.rsplit("/", 1)[0])
from oracles import brute_automorphisms, genus0_closed, naive_graph_count  # noqa: E402

RESULTS = {}


def _suite(name):
    lines = suites.run_suite(name)
    bad = [l.render() for l in lines if not l.ok]
    return not bad, f"{len(lines)} check lines" + ("; " + bad[0] if bad else "")


def _queries():
    for g in range(4):
        for n in range(1, 7):
            if 2 * g - 2 + n > 0:
                yield from ((g, ks) for ks in it.on_dimension_vectors(g, n))


def criterion_1():
    n = bad = 0
    witness = None
    for g, ks in _queries():
        n += 1
        ref = it.psi_intersection(g, ks, "dvv")
        others = []
        if it.reducible(g, ks):
            others.append(it.psi_intersection(g, ks, "string_dilaton"))
        if g == 0:
            others.append(it.psi_intersection(g, ks, "genus0_closed"))
            others.append(genus0_closed(ks))
        if any(o != ref for o in others):
            bad += 1
            witness = witness or (g, ks, ref, others)
    anchors = {
        "<tau_0^3>_0 = 1": it.psi_intersection(0, (0, 0, 0)) == 1,
        "<tau_1>_1 = 1/24 (dvv, string_dilaton)":
            it.psi_intersection(1, (1,), "dvv") == it.psi_intersection(1, (1,), "string_dilaton") == Fraction(1, 24),
        "<tau_4>_2 = 1/1152 (dvv, string_dilaton)":
            it.psi_intersection(2, (4,), "dvv") == it.psi_intersection(2, (4,), "string_dilaton") == Fraction(1, 1152),
    }
    failed = [k for k, v in anchors.items() if not v]
    ok = not bad and not failed
    return ok, f"{n} queries, {bad} disagreements" + (f"; {witness}" if witness else "") + \
        (f"; anchors failed {failed}" if failed else "")


def criterion_2():
    n = 0
    for g, ks in _queries():
        n += 1
        m = len(ks)
        psi = it.psi_intersection(g, ks)
        cei = ce.cei_point(g, ks)
        v = ce.string_vertex_coefficient(g, ks)
        series = ce.mc_pushforward_series(g, m)
        if not (cei == psi and v == cei / factorial(m)
                and series[ks] * ce.aut_multiplicity(ks) == factorial(m) * v
                and ce.q_derivative(series, ks) == factorial(m) * v):
            return False, f"mismatch at g={g} ks={ks}"
    return True, f"{n} queries agree exactly"


def criterion_3():
    rng = random.Random(1000)
    n = 0
    while n < 1000:
        g = rng.randint(0, 3)
        m = rng.randint(1, 6)
        if 2 * g - 2 + m <= 0:
            continue
        ks = tuple(rng.randint(0, 3 * g - 3 + m + 2) for _ in range(m))
        if it.dimension_ok(g, ks):
            continue
        n += 1
        if it.psi_intersection(g, ks) != 0 or ce.cei_point(g, ks) != 0:
            return False, f"nonzero off-dimension value at g={g} ks={ks}"
    return True, "1000 off-dimension queries return 0"


def criterion_4():
    slots = [(g, n) for g in range(4) for n in range(7) if 0 < 2 * g - 2 + n <= 4]
    for g, n in slots:
        a, b = len(sg.enumerate_stable_graphs(g, n)), naive_graph_count(g, n)
        if a != b:
            return False, f"({g},{n}): {a} graphs, oracle {b}"
    anchors = {(0, 3): 1, (1, 1): 2, (0, 4): 4, (1, 2): 5}
    for t, want in anchors.items():
        if len(sg.enumerate_stable_graphs(*t)) != want:
            return False, f"anchor {t}"
    return True, f"{len(slots)} slots match the naive oracle"


def criterion_5():
    return _suite("operad")


def criterion_6():
    return _suite("feynman")


def criterion_7():
    rng = random.Random(7)
    for _ in range(20):
        R = [[[rng.randint(-3, 3) for _ in range(3)] for _ in range(3)] for _ in range(2)]
        T = tv.invert_unital_series(R, 2)
        if T[1] != tv.matadd(tv.zeros(3), R[0], -1):
            return False, f"T1 != -R1 for R={R}"
        if T[2] != tv.matadd(tv.matmul(R[0], R[0]), R[1], -1):
            return False, f"T2 != -R2 + R1 R1 for R={R}"
    ok, detail = _suite("trivialization")
    return ok, "T1, T2 closed forms hold; " + detail


def criterion_8():
    return _suite("dgla")


def criterion_9():
    return _suite("resolution")


def criterion_10():
    n = 0
    for g in range(4):
        for m in range(7):
            if 0 < 2 * g - 2 + m <= 4:
                for G in sg.enumerate_stable_graphs(g, m):
                    n += 1
                    if dl.degree_identity(G) != 0:
                        return False, f"degree identity fails on {dl.graph_code(G)}"
    want = {(0, 3): [1], (1, 1): [1, Fraction(1, 2)], (0, 4): [1, 1, 1, 1]}
    for (g, m), weights in want.items():
        recs = dl.pushforward_records(g, m)
        got = sorted((r["weight"] for r in recs), reverse=True)
        brute = sorted((Fraction(1, brute_automorphisms(G)) for G in sg.enumerate_stable_graphs(g, m)),
                       reverse=True)
        if got != weights or brute != weights:
            return False, f"({g},{m}) weights {got}, brute force {brute}, expected {weights}"
        if any(r["degree"] != 6 * g - 6 + 2 * m for r in recs):
            return False, f"({g},{m}) degree"
    return True, f"degree identity on {n} graphs; weights {{1}}, {{1, 1/2}}, {{1, 1, 1, 1}}"


CRITERIA = [
    (1, "psi numbers agree across engines", criterion_1),
    (2, "invariants equal psi numbers", criterion_2),
    (3, "off-dimension queries vanish", criterion_3),
    (4, "stable graph counts", criterion_4),
    (5, "operad axioms on the torus fixture", criterion_5),
    (6, "Feynman compactification suite", criterion_6),
    (7, "trivialization suite", criterion_7),
    (8, "DGLA and master equation suite", criterion_8),
    (9, "resolution and perturbation suite", criterion_9),
    (10, "push-forward bookkeeping", criterion_10),
]


def _run(num, title, fn):
    start = time.time()
    ok, detail = fn()
    line = f"criterion {num:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail} [{time.time() - start:.1f}s]"
    RESULTS[num] = line
    return ok, line


@pytest.mark.parametrize("num,title,fn", CRITERIA, ids=[f"criterion_{c[0]:02d}" for c in CRITERIA])
def test_criterion(num, title, fn):
    ok, line = _run(num, title, fn)
    print(line)
    assert ok, line


if __name__ == "__main__":
    good = True
    for c in CRITERIA:
        ok, line = _run(*c)
        print(line, flush=True)
        good &= ok
    sys.exit(0 if good else 1)
