"""Homotopy quotients, twisted sewing and the Feynman compactification FP.

Conventions
-----------
* u_h has degree -2, so a monomial prod u_h^{-k_h} has degree 2*sum(k).
* Truncation keeps k_h <= depth for every variable.  Multiplication by u_h
  lowers k_h and kills k_h = 0, so truncated spaces are subcomplexes.
* An FP term is (graph index, vertex basis keys, exponents per half-edge) on a
  canonical stable graph.  Edge factors D_e are even and sit before the vertex
  factors, so they never contribute signs.
* Aut(G)-coinvariants use an orbit normal form: the least transported key
  stands for the orbit, and a term whose stabiliser acts by -1 is zero.  This
  needs a monomial fixture (every permutation maps basis to +-basis).
* Optional weight sectors: when the fixture has weights, the quantity
  sum(weights) + sum(k) + |E| is preserved by d and by FP compositions, so
  capping it is again exact.

Public slot arguments (i, j) are 1-based.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import kernels
from . import stable_graphs as sg
from .linalg import add_term, rank
from .operad_fixture import (OperadFixture, koszul_sort_sign, pg_B, pg_contract, pg_d,
                             vertex_types)


class TruncationError(ValueError):
    pass


class NonMonomialFixture(ValueError):
    pass


# ================================================================ homotopy quotient

@dataclass
class QuotientComplex:
    g: int
    n: int
    depth: int
    basis: list          # (fixture key, exponents)
    degrees: list
    columns: list        # sparse columns of the differential
    window: int          # homology is exact in degrees <= window

    def homology(self) -> dict:
        """Betti numbers by degree, restricted to the exact window."""
        by_deg = {}
        for idx, d in enumerate(self.degrees):
            by_deg.setdefault(d, []).append(idx)
        ranks = {}
        for d, idxs in by_deg.items():
            ranks[d] = rank([dict(self.columns[i]) for i in idxs])
        out = {}
        for d, idxs in sorted(by_deg.items()):
            if d > self.window:
                continue
            dim = len(idxs) - ranks[d] - ranks.get(d + 1, 0)
            if dim:
                out[d] = dim
        return out

    def total_homology(self) -> int:
        return sum(self.homology().values())


def _exponents(n: int, depth: int):
    return itertools.product(range(depth + 1), repeat=n)


_bounded_exponents = kernels.bounded_exponents


def _weighted_keys(F, types, budget: int):
    if budget < 0:
        return
    if not types:
        yield ()
        return
    (g, n), rest = types[0], types[1:]
    for a in range(F.dim(g, n)):
        w = F.weight(g, n, a)
        if w <= budget:
            for tail in _weighted_keys(F, rest, budget - w):
                yield (a,) + tail


def homotopy_quotient(F: OperadFixture, g: int, n: int, depth: int) -> QuotientComplex:
    """P(g,n)[u_1^-1..u_n^-1] truncated at depth, with differential d + sum B_j u_j."""
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    basis = [(a, ks) for ks in _exponents(n, depth) for a in range(F.dim(g, n))]
    index = {b: i for i, b in enumerate(basis)}
    degrees = [F.deg(g, n, a) + 2 * sum(ks) for a, ks in basis]
    columns = []
    for a, ks in basis:
        col = {}
        for r, c in F.d[(g, n)][a]:
            add_term(col, index[(r, ks)], c)
        for j in range(n):
            if ks[j]:
                low = ks[:j] + (ks[j] - 1,) + ks[j + 1:]
                for r, c in F.B[(g, n, j)][a]:
                    add_term(col, index[(r, low)], c)
        columns.append(tuple(sorted(col.items())))
    mindeg = min(F.degrees[(g, n)])
    return QuotientComplex(g, n, depth, basis, degrees, columns, 2 * depth + mindeg)


def hq_differential(F: OperadFixture, g: int, n: int, x: dict) -> dict:
    """Differential of a homotopy-quotient element {(key, exponents): coef}."""
    out = {}
    for (a, ks), c in x.items():
        for r, y in F.d[(g, n)][a]:
            add_term(out, (r, ks), y * c)
        for j in range(n):
            if ks[j]:
                low = ks[:j] + (ks[j] - 1,) + ks[j + 1:]
                for r, y in F.B[(g, n, j)][a]:
                    add_term(out, (r, low), y * c)
    return out


def _drop(ks: tuple, drop) -> tuple:
    return tuple(k for t, k in enumerate(ks) if t not in drop)


def twisted_sewing_loop(F: OperadFixture, g: int, n: int, i: int, j: int, x: dict) -> dict:
    """rho_ij on P(g,n)_{S^1}: zero unless k_i = k_j = 0, else c_ij(B_i x)."""
    if i == j or not (1 <= i <= n and 1 <= j <= n):
        raise ValueError("need distinct slots 1 <= i, j <= n")
    a0, b0 = i - 1, j - 1
    lo, hi = sorted((a0, b0))
    out = {}
    for (a, ks), c in x.items():
        if ks[a0] or ks[b0]:
            continue
        rest = _drop(ks, (a0, b0))
        for r, y in F.B[(g, n, a0)][a]:
            for r2, z in F.loop[(g, n, lo, hi)][r]:
                add_term(out, (r2, rest), y * z * c)
    return out


def twisted_sewing_pair(F: OperadFixture, left: tuple, right: tuple) -> dict:
    """rho_ij(x, y) = c_ij(B_i x (x) y) when k_i = l_j = 0; left = (g, n, i, x)."""
    g, n, i, x = left
    g2, n2, j, y = right
    i0, j0 = i - 1, j - 1
    table = F.pair[(g, n, i0, g2, n2, j0)]
    out = {}
    for (a, ks), c in x.items():
        if ks[i0]:
            continue
        for r, s in F.B[(g, n, i0)][a]:
            for (b, ls), d in y.items():
                if ls[j0]:
                    continue
                exps = _drop(ks, (i0,)) + _drop(ls, (j0,))
                for r2, z in table.get((r, b), ()):
                    add_term(out, (r2, exps), s * z * c * d)
    return out


# ================================================================ FP

@dataclass(frozen=True)
class _Plan:
    """Monomial transport along an isomorphism onto a canonical graph."""
    target: int                 # graph index in the target list
    vmap: tuple
    perms: tuple                # per source vertex: sparse columns of the slot permutation
    hmap: tuple                 # (source half-edge, target half-edge) pairs


@dataclass
class FeynmanElement:
    g: int
    n: int
    terms: dict = field(default_factory=dict)     # (graph index, keys, exponents) -> coef

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        return (self.g, self.n, self.terms) == (other.g, other.n, other.terms)

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            add_term(out, k, c)
        return FeynmanElement(self.g, self.n, out)

    def scaled(self, s):
        return FeynmanElement(self.g, self.n, {k: s * c for k, c in self.terms.items()} if s else {})


class FPSpace:
    """FP(g, n) over a fixture, truncated at a per-variable u-depth and optional weight cap."""

    def __init__(self, F: OperadFixture, g: int, n: int, depth: int = 2, weight: int | None = None):
        if not sg.is_stable_type(g, n):
            raise sg.UnstableError(f"unstable type ({g},{n})")
        if weight is not None and not F.weights:
            raise ValueError("a weight cap needs a fixture with weights")
        self.F, self.g, self.n, self.depth, self.weight = F, g, n, depth, weight
        self.graphs = sg.enumerate_stable_graphs(g, n)
        self.index = {G: i for i, G in enumerate(self.graphs)}
        self._aut = [None] * len(self.graphs)
        self._nf = {}
        self._plans = {}

    def plan_for(self, T: sg.StableGraph) -> _Plan:
        """Transport plan from a labelled graph of this type onto its canonical form."""
        plan = self._plans.get(T)
        if plan is None:
            C, hmap = sg.canonical_form(T)
            plan = _make_plan(self.F, T, C, self.index[C], hmap)
            self._plans[T] = plan
        return plan

    # ------------------------------------------------------------ terms

    def graph(self, gi: int) -> sg.StableGraph:
        return self.graphs[gi]

    def degree(self, term) -> int:
        gi, keys, ks = term
        G = self.graphs[gi]
        return (2 * len(G.edges) + sum(self.F.deg(t[0], t[1], k) for t, k in zip(vertex_types(G), keys))
                + 2 * sum(ks))

    def term_weight(self, term) -> int:
        gi, keys, ks = term
        G = self.graphs[gi]
        return (len(G.edges) + sum(self.F.weight(t[0], t[1], k) for t, k in zip(vertex_types(G), keys))
                + sum(ks))

    def in_range(self, term) -> bool:
        if max(term[2], default=0) > self.depth:
            return False
        return self.weight is None or self.term_weight(term) <= self.weight

    def check_term(self, term):
        if max(term[2], default=0) > self.depth:
            raise TruncationError(f"u-exponent above depth {self.depth} in {term}")
        if self.weight is not None and self.term_weight(term) > self.weight:
            raise TruncationError(f"term above weight cap {self.weight}: {term}")

    # ------------------------------------------------------------ coinvariants

    def _aut_plans(self, gi: int):
        if self._aut[gi] is None:
            G = self.graphs[gi]
            plans = []
            for phi in sg.automorphisms(G):
                hmap = dict(enumerate(phi))
                plans.append(_make_plan(self.F, G, G, gi, hmap))
            self._aut[gi] = plans
        return self._aut[gi]

    def normal_form(self, term):
        """(sign, representative) of the coinvariant class, or None when it vanishes."""
        hit = self._nf.get(term)
        if hit is not None or term in self._nf:
            return hit
        gi, keys, ks = term
        plans = self._aut_plans(gi)
        if len(plans) == 1:
            res = (1, term)
        else:
            images = {}
            zero = False
            for plan in plans:
                s, k2, e2 = _apply_plan(self.F, self.graphs[gi], plan, keys, ks)
                prev = images.get((k2, e2))
                if prev is None:
                    images[(k2, e2)] = s
                elif prev != s:
                    zero = True
                    break
            if zero:
                res = None
            else:
                best = min(images)
                # term = s_best^{-1} * image, and [image] = [term]
                res = (images[best], (gi,) + best)
        self._nf[term] = res
        return res

    def element(self, terms: dict) -> FeynmanElement:
        out = {}
        for t, c in terms.items():
            nf = self.normal_form(t)
            if nf is not None:
                add_term(out, nf[1], nf[0] * c)
        return FeynmanElement(self.g, self.n, out)

    def raw_terms(self, gi: int):
        """All labelled basis terms on graph gi inside the truncation."""
        G = self.graphs[gi]
        H = len(G.half_edges())
        types = vertex_types(G)
        if self.weight is None:
            dims = [range(self.F.dim(t[0], t[1])) for t in types]
            for keys in itertools.product(*dims):
                for ks in _exponents(H, self.depth):
                    yield (gi, keys, ks)
            return
        budget = self.weight - len(G.edges)
        for keys in _weighted_keys(self.F, types, budget):
            left = budget - sum(self.F.weight(t[0], t[1], k) for t, k in zip(types, keys))
            for ks in _bounded_exponents(H, self.depth, left):
                yield (gi, keys, ks)

    def basis(self) -> list:
        """Normal-form representatives spanning the truncated space."""
        reps = set()
        for gi in range(len(self.graphs)):
            for term in self.raw_terms(gi):
                nf = self.normal_form(term)
                if nf is not None:
                    reps.add(nf[1])
        return sorted(reps)

    # ------------------------------------------------------------ differential

    def differential(self, elt: FeynmanElement) -> FeynmanElement:
        raw = {}
        for term, c in elt.terms.items():
            self.check_term(term)
            for t2, c2 in self._d_raw(term).items():
                add_term(raw, t2, c2 * c)
        return self.element(raw)

    def _d_raw(self, term) -> dict:
        F = self.F
        gi, keys, ks = term
        G = self.graphs[gi]
        out = {}
        # vertex differential
        for k2, c in pg_d(F, G, {keys: 1}).items():
            add_term(out, (gi, k2, ks), c)
        # circle operators u_h B_h
        for h, k in enumerate(ks):
            if not k:
                continue
            low = ks[:h] + (k - 1,) + ks[h + 1:]
            for k2, c in pg_B(F, G, h, {keys: 1}).items():
                add_term(out, (gi, k2, low), c)
        # delta: one twisted sewing per edge with both exponents zero
        for e, (h1, h2) in enumerate(G.edges):
            if ks[h1] or ks[h2]:
                continue
            twisted = pg_B(F, G, h1, {keys: 1})
            if not twisted:
                continue
            con, res = pg_contract(F, G, e, twisted)
            plan = self.plan_for(con.target)
            for k2, c in res.items():
                s, k3, e3 = _apply_plan(F, con.target, plan, k2, ks)
                add_term(out, (plan.target, k3, e3), s * c)
        return out


def _make_plan(F: OperadFixture, T: sg.StableGraph, C: sg.StableGraph, target: int, hmap: dict) -> _Plan:
    voC = C.vertex_of()
    vmap, perms = [], []
    for v in range(T.nv):
        hs = T.vhalf[v]
        w = voC[hmap[hs[0]]] if hs else v
        vmap.append(w)
        p = tuple(C.vhalf[w].index(hmap[h]) for h in hs)
        perms.append(F.perm_cols(T.genus[v], len(hs), p))
    return _Plan(target, tuple(vmap), tuple(perms), tuple(sorted(hmap.items())))


def _apply_plan(F: OperadFixture, T: sg.StableGraph, plan: _Plan, keys: tuple, ks):
    """Transport a basis term; ks maps source half-edge ids to exponents (tuple or dict)."""
    nv = len(keys)
    sign = 1
    new = [0] * nv
    par = [0] * nv
    for v in range(nv):
        col = plan.perms[v][keys[v]]
        if len(col) != 1:
            raise NonMonomialFixture("coinvariant normal forms need a monomial fixture")
        r, c = col[0]
        sign *= c
        new[plan.vmap[v]] = r
        g, n = T.genus[v], len(T.vhalf[v])
        par[v] = F.deg(g, n, r) & 1
    sign *= koszul_sort_sign(par, plan.vmap)
    exps = [0] * len(plan.hmap)
    for h, h2 in plan.hmap:
        exps[h2] = ks[h]
    return sign, tuple(new), tuple(exps)


def fp_differential(space: FPSpace, elt: FeynmanElement) -> FeynmanElement:
    return space.differential(elt)


# ================================================================ compositions

def _shift_graph(G: sg.StableGraph, off: int):
    return ([tuple(h + off for h in hs) for hs in G.vhalf], [h + off for h in G.legs],
            [(a + off, b + off) for a, b in G.edges])


def _finish(target: FPSpace, T: sg.StableGraph, keys_terms: dict, exps: dict, out: dict):
    plan = target.plan_for(T)
    for k2, c in keys_terms.items():
        s, k3, e3 = _apply_plan(target.F, T, plan, k2, exps)
        add_term(out, (plan.target, k3, e3), s * c)


def _compose_term(target: FPSpace, J: sg.StableGraph, e: int, keys: tuple, exps: dict, out: dict, c):
    h1, h2 = J.edges[e]
    F = target.F
    if exps[h1] == 0 and exps[h2] == 0:
        con, res = pg_contract(F, J, e, {keys: c})
        rest = {h: k for h, k in exps.items() if h not in (h1, h2)}
        _finish(target, con.target, res, rest, out)
        return
    for h in (h1, h2):
        if exps[h]:
            low = dict(exps)
            low[h] -= 1
            _finish(target, J, {keys: c}, low, out)


def fp_compose_loop(source: FPSpace, target: FPSpace, i: int, j: int, elt: FeynmanElement) -> FeynmanElement:
    """FP(c_ij): FP(g, n+2) -> FP(g+1, n) joining legs i and j into an edge."""
    if (target.g, target.n) != (source.g + 1, source.n - 2):
        raise ValueError("target must be FP(g+1, n-2)")
    out = {}
    for (gi, keys, ks), c in elt.terms.items():
        source.check_term((gi, keys, ks))
        H = source.graphs[gi]
        hi, hj = H.legs[i - 1], H.legs[j - 1]
        legs = [h for t, h in enumerate(H.legs) if t not in (i - 1, j - 1)]
        J = sg.make_graph(H.genus, H.vhalf, legs, list(H.edges) + [(hi, hj)])
        e = sg.edge_index(J, (hi, hj))
        _compose_term(target, J, e, keys, dict(enumerate(ks)), out, c)
    return target.element(out)


def fp_compose_pair(left: FPSpace, i: int, right: FPSpace, j: int, target: FPSpace,
                    x: FeynmanElement, y: FeynmanElement) -> FeynmanElement:
    """FP(c_ij): FP(g, n) (x) FP(g', n') -> FP(g+g', n+n'-2) joining leg i to leg j."""
    if (target.g, target.n) != (left.g + right.g, left.n + right.n - 2):
        raise ValueError("target type does not match")
    out = {}
    for (ga, ka, ea), ca in x.terms.items():
        A = left.graphs[ga]
        off = len(A.half_edges())
        for (gb, kb, eb), cb in y.terms.items():
            Bg = right.graphs[gb]
            vh, lg, ed = _shift_graph(Bg, off)
            hi, hj = A.legs[i - 1], lg[j - 1]
            legs = [h for t, h in enumerate(A.legs) if t != i - 1] + [h for t, h in enumerate(lg) if t != j - 1]
            J = sg.make_graph(list(A.genus) + list(Bg.genus), list(A.vhalf) + vh, legs,
                              list(A.edges) + ed + [(hi, hj)])
            e = sg.edge_index(J, (hi, hj))
            exps = dict(enumerate(ea))
            exps.update({h + off: k for h, k in enumerate(eb)})
            _compose_term(target, J, e, ka + kb, exps, out, ca * cb)
    return target.element(out)


# ================================================================ checks

@dataclass
class CheckResult:
    name: str
    checked: int = 0
    witness: object = None

    @property
    def ok(self) -> bool:
        return self.witness is None


def differential_matrix(space: FPSpace, basis=None):
    basis = space.basis() if basis is None else basis
    cols = {}
    for t in basis:
        cols[t] = space.differential(FeynmanElement(space.g, space.n, {t: 1})).terms
    return basis, cols


def check_d_squared(space: FPSpace) -> CheckResult:
    """Exhaustive (d + delta)^2 = 0 and the degree audit over the truncated basis."""
    res = CheckResult(f"d^2 FP({space.g},{space.n})")
    basis, cols = differential_matrix(space)
    for t in basis:
        res.checked += 1
        dt = cols[t]
        deg = space.degree(t)
        if any(space.degree(s) != deg - 1 for s in dt):
            res.witness = ("degree", t)
            return res
        acc = {}
        for s, c in dt.items():
            for s2, c2 in cols[s].items():
                add_term(acc, s2, c * c2)
        if acc:
            res.witness = ("d^2", t, acc)
            return res
    return res


def check_loop_chain_map(source: FPSpace, target: FPSpace, i: int, j: int) -> CheckResult:
    res = CheckResult(f"chain map loop c{i}{j} FP({source.g},{source.n})")
    for t in source.basis():
        res.checked += 1
        x = FeynmanElement(source.g, source.n, {t: 1})
        lhs = target.differential(fp_compose_loop(source, target, i, j, x))
        rhs = fp_compose_loop(source, target, i, j, source.differential(x))
        if lhs != rhs:
            res.witness = (t, lhs.terms, rhs.terms)
            return res
    return res


def check_pair_chain_map(left: FPSpace, i: int, right: FPSpace, j: int, target: FPSpace) -> CheckResult:
    res = CheckResult(f"chain map pair c{i}{j} FP({left.g},{left.n})xFP({right.g},{right.n})")
    rb = right.basis()
    dr = {t: right.differential(FeynmanElement(right.g, right.n, {t: 1})) for t in rb}
    for s in left.basis():
        x = FeynmanElement(left.g, left.n, {s: 1})
        dx = left.differential(x)
        sign = -1 if left.degree(s) & 1 else 1
        for t in rb:
            if left.weight is not None and target.weight is not None:
                # outputs above the target cap are outside the tested sector
                if left.term_weight(s) + right.term_weight(t) > target.weight:
                    continue
            res.checked += 1
            y = FeynmanElement(right.g, right.n, {t: 1})
            lhs = target.differential(fp_compose_pair(left, i, right, j, target, x, y))
            rhs = fp_compose_pair(left, i, right, j, target, dx, y) + \
                fp_compose_pair(left, i, right, j, target, x, dr[t]).scaled(sign)
            if lhs != rhs:
                res.witness = (s, t, lhs.terms, rhs.terms)
                return res
    return res


def check_coinvariance(space: FPSpace) -> CheckResult:
    """Transporting a term by an automorphism first leaves its normal form unchanged."""
    res = CheckResult(f"coinvariants FP({space.g},{space.n})")
    for gi, G in enumerate(space.graphs):
        plans = space._aut_plans(gi)
        if len(plans) == 1:
            continue
        for term in space.raw_terms(gi):
            _, keys, ks = term
            base = space.element({term: 1})
            for plan in plans:
                res.checked += 1
                s, k2, e2 = _apply_plan(space.F, G, plan, keys, ks)
                if space.element({(gi, k2, e2): s}) != base:
                    res.witness = (term, plan.hmap)
                    return res
    return res
