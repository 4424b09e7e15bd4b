"""Verification suites shared by the command line and the acceptance tests.

Each suite returns a list of Line records; a suite passes when every line does.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from . import dgla as dl
from . import feynman as fy
from . import operad_fixture as of
from . import resolution as rs
from . import stable_graphs as sg
from . import trivialization as tv

SUITES = ("operad", "feynman", "trivialization", "dgla", "resolution")


@dataclass
class Line:
    suite: str
    name: str
    ok: bool
    checked: int
    witness: object = None

    def render(self) -> str:
        status = "pass" if self.ok else "FAIL"
        out = f"{status} {self.suite}: {self.name} ({self.checked} checks)"
        if not self.ok:
            out += f"\n  witness: {str(self.witness)[:600]}"
        return out


def _line(suite, c) -> Line:
    return Line(suite, c.name, c.ok, c.checked, c.witness)


def _slots(chi_max):
    return [(g, n) for g in range(chi_max // 2 + 2) for n in range(chi_max + 3)
            if 0 < 2 * g - 2 + n <= chi_max and n >= 1]


# ---------------------------------------------------------------- operad

def operad_suite(F=None, quick=False) -> list:
    F = of.torus_fixture() if F is None else F
    rep = of.validate_s1_modular_axioms(F, (1, 4) if quick else (2, 4))
    return [Line("operad", name, r.ok, r.checked, r.witness) for name, r in rep.results.items()]


# ---------------------------------------------------------------- feynman

def feynman_suite(F=None, quick=False) -> list:
    F = of.torus_fixture() if F is None else F
    chi_max, W = (3, 4) if quick else (4, 5)
    out = []
    sp = {}

    def space(g, n):
        if (g, n) not in sp:
            sp[(g, n)] = fy.FPSpace(F, g, n, 2, W)
        return sp[(g, n)]

    for g, n in _slots(chi_max):
        out.append(_line("feynman", fy.check_d_squared(space(g, n))))
    for g, n in [(0, 4), (0, 5), (1, 3)]:
        if 2 * (g + 1) - 2 + n - 2 <= chi_max and n - 2 >= 1:
            out.append(_line("feynman", fy.check_loop_chain_map(space(g, n), space(g + 1, n - 2), 1, 2)))
    for a, i, b, j in [((0, 3), 2, (0, 3), 1), ((1, 1), 1, (0, 3), 3), ((0, 4), 3, (0, 3), 2)]:
        t = (a[0] + b[0], a[1] + b[1] - 2)
        if 2 * t[0] - 2 + t[1] <= chi_max:
            out.append(_line("feynman", fy.check_pair_chain_map(space(*a), i, space(*b), j, space(*t))))
    out.append(_line("feynman", fy.check_coinvariance(space(0, 4))))
    return out


# ---------------------------------------------------------------- trivialization

def _random_series(rng, n, order):
    return [[[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)] for _ in range(order)]


def trivialization_suite(F=None, quick=False) -> list:
    F = of.torus_fixture() if F is None else F
    out = []
    rng = random.Random(20240531)
    bad, n = None, 0
    for _ in range(5 if quick else 20):
        R = _random_series(rng, 3, 6)
        T = tv.invert_unital_series(R, 6)
        n += 1
        if any(not tv.is_zero(D) for D in tv.inversion_defect(R, T)):
            bad = R
    out.append(Line("trivialization", "sum T_i R_j = delta to order 6", bad is None, n, bad))
    A = tv.edge_model_algebra(F)
    probs = tv.validation_problems(A.V)
    out.append(Line("trivialization", "edge model series valid", not probs, 1, probs or None))
    checked, w = tv.check_edge_identity(A.V, 2)
    out.append(Line("trivialization", "[b + uB, H^sym] = edge pairing", w is None, checked, w))
    probs = tv.validate_cyclic_algebra(A, [(0, 3), (1, 1), (0, 4), (1, 2)])
    out.append(Line("trivialization", "cyclic algebra axioms", not probs, 1, probs or None))
    Hs = tv.EdgeForm(A.V, 2)
    slots = [(0, 3, 3), (1, 1, 3), (0, 4, 4)] + ([] if quick else [(1, 2, 4)])
    for g, n, W in slots:
        checked, w = tv.check_action_chain_map(fy.FPSpace(F, g, n, 2, W), A, Hs)
        out.append(Line("trivialization", f"FP action chain map ({g},{n})", w is None, checked, w))
    # R = 0: every term with an edge acts by zero
    zero = tv.with_series(A.V, [tv.zeros(A.V.dim)])
    A0 = tv.CyclicAlgebra(A.fixture, zero, A.action)
    H0 = tv.EdgeForm(zero, 2)
    space = fy.FPSpace(F, 0, 4, 2, 4)
    bad, n = None, 0
    for t in space.basis():
        if space.graphs[t[0]].edges:
            n += 1
            if tv.fp_action_tensor(space, A0, H0, t):
                bad = t
                break
    out.append(Line("trivialization", "R = 0 gives a zero edge action", bad is None, n, bad))
    return out


# ---------------------------------------------------------------- dgla

def dgla_suite(F=None, quick=False) -> list:
    out = []
    chi_max = 3 if quick else 4
    for G in ([of.disk_fixture()] if F is None else [F]) + ([] if F is not None else [of.torus_fixture()]):
        dg = dl.DGLA(G)
        tag = f"[{G.name}] "
        checks = dl.check_delta(dg, chi_max) + dl.check_bracket(dg, chi_max) + [dl.check_jacobi(dg, chi_max)]
        for c in checks:
            out.append(Line("dgla", tag + c.name, c.ok, c.checked, c.witness))
        sol = dl.solve_qme(dg, {(0, (0,) * 3): 1}, chi_max)
        hi = 0
        while hi < chi_max and all(t in sol.solved for t in dl.qme_slots(G, hi + 1)):
            hi += 1
        if hi:
            res = dl.qme_residual(dg, sol.V, hi)
            nz = {s: r for s, r in res.items() if r}
            out.append(Line("dgla", tag + f"QME residual zero for 2g-2+n <= {hi}", not nz, len(res), nz or None))
            for c in dl.check_pushforward(dg, sol.V, dl.qme_slots(G, hi)):
                out.append(Line("dgla", tag + c.name, c.ok, c.checked, c.witness))
        if sol.obstruction is not None:
            ob = sol.obstruction
            certified = ob.closed and not ob.exact
            out.append(Line("dgla", tag + f"QME obstruction at {ob.slot} is a nonzero class", certified, 1,
                            None if certified else ob))
    return out


# ---------------------------------------------------------------- resolution

def resolution_suite(F=None, quick=False) -> list:
    F = of.torus_fixture() if F is None else F
    triv = of.trivial_fixture()
    out = []
    retract = rs.Check("[d1 + d3, h] = id - i pi, <= 3 edges", 0)
    types = [(0, 3), (1, 1), (0, 4), (1, 2)] + ([] if quick else [(0, 5), (2, 1)])
    for g, n in types:
        for G in sg.enumerate_stable_graphs(g, n):
            if len(G.edges) > 3:
                continue
            c = rs.retract_check(G, triv, 0)
            retract.checked += c.checked
            if not c.ok and retract.ok:
                retract.witness = c.witness
    out.append(_line("resolution", retract))
    small = [G for t in [(1, 1), (0, 4), (1, 2)] for G in sg.enumerate_stable_graphs(*t) if 1 <= len(G.edges) <= (1 if quick else 2)]
    for G in small:
        keys = _sample_keys(F, G, 8 if quick else 24)
        tag = f" over {dl.graph_code(G)}"
        for c in (rs.check_total_d_squared(G, F, 1, keys), rs.check_delta2_chain_map(G, F, 1, keys)):
            c.name += tag
            out.append(_line("resolution", c))
        rep = rs.perturbed_differential(G, F, 1, keys)
        for c in (rep.differential, rep.i_chain, rep.pi_chain, rep.retraction):
            c.name += tag
            out.append(_line("resolution", c))
    edge = rs.Check("pi delta2 h d i = rho_e on one-edge graphs", 0)
    for G in small:
        if len(G.edges) != 1:
            continue
        for key in _all_keys(F, G):
            ks = {h: 0 for h in G.half_edges()}
            edge.checked += 1
            if rs.edge_term(F, G, key, ks) != rs.sewing_term(F, G, key, ks) and edge.ok:
                edge.witness = (dl.graph_code(G), key)
    out.append(_line("resolution", edge))
    return out


def _all_keys(F, G):
    import itertools
    types = [(G.genus[v], len(G.vhalf[v])) for v in range(G.nv)]
    return list(itertools.product(*(range(F.dim(*t)) for t in types)))


def _sample_keys(F, G, limit):
    import itertools
    types = [(G.genus[v], len(G.vhalf[v])) for v in range(G.nv)]
    keys = list(itertools.product(*(range(F.dim(*t)) for t in types)))
    if limit is None or len(keys) <= limit:
        return None
    step = max(1, len(keys) // limit)
    return keys[::step][:limit]


RUNNERS = {
    "operad": operad_suite,
    "feynman": feynman_suite,
    "trivialization": trivialization_suite,
    "dgla": dgla_suite,
    "resolution": resolution_suite,
}


def run_suite(name: str, F=None, quick=False) -> list:
    return RUNNERS[name](F, quick)
