"""The string-vertex DGLA over a fixture, the quantum master equation and push-forwards.

A slot (g, n) holds S_n-invariant elements of the homotopy quotient
P(g, n)[u_1^-1..u_n^-1], stored as dicts {(key, exponents): coef}.  Invariants
stand in for coinvariants through averaging, so every operation ends with the
symmetrizer Sym = (1/n!) sum over S_n.

Spaces are enumerated by homological degree (key degree + 2 sum k), which is
exact: no u-truncation is involved.

Conventions (checked by the test suite):
  Delta x      = Sym sum_{i<j} rho_ij(x),                degree +1
  {x, y}       = (-1)^|x| Sym sum_{i,j} rho_ij(x (x) y),  degree +1
  QME at (g,n):  D V_{g,n} + Delta V_{g-1,n+2} + 1/2 sum {V', V''} = 0
with D = d + sum u_i B_i.  With shifted degree |x|' = |x| + 1 the bracket is
graded antisymmetric and satisfies the graded Jacobi identity.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from . import stable_graphs as sg
from .feynman import FeynmanElement, FPSpace, hq_differential, twisted_sewing_loop, twisted_sewing_pair
from .linalg import add_into, add_term, solve
from .operad_fixture import OperadFixture, koszul_sort_sign


class IncompleteInput(KeyError):
    pass


class RejectedInput(ValueError):
    pass


def chi(g: int, n: int) -> int:
    return 2 * g - 2 + n


def mc_degree(g: int, n: int) -> int:
    """Homological degree of the string vertex V_{g,n}."""
    return 6 * g - 6 + 2 * n


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for k in range(total + 1):
        for rest in _compositions(total - k, parts - 1):
            yield (k,) + rest


class DGLA:
    """Operations on invariant homotopy-quotient elements of one fixture."""

    def __init__(self, F: OperadFixture):
        self.F = F
        self._basis = {}
        self._perms = {}

    # ------------------------------------------------------------ S_n action

    def _perm_list(self, n: int):
        ps = self._perms.get(n)
        if ps is None:
            ps = list(itertools.permutations(range(n)))
            self._perms[n] = ps
        return ps

    def permute(self, g: int, n: int, perm, x: dict) -> dict:
        """Move slot i to slot perm[i] on keys and exponents."""
        out = {}
        cols = self.F.perm_cols(g, n, perm)
        for (a, ks), c in x.items():
            new = [0] * n
            for i, k in enumerate(ks):
                new[perm[i]] = k
            new = tuple(new)
            for r, v in cols[a]:
                add_term(out, (r, new), v * c)
        return out

    def sym(self, g: int, n: int, x: dict) -> dict:
        if n <= 1 or not x:
            return dict(x)
        out = {}
        for p in self._perm_list(n):
            add_into(out, self.permute(g, n, p, x))
        f = factorial(n)
        return {k: Fraction(c, f) for k, c in out.items()}

    def sym_sum(self, g: int, n: int, x: dict) -> dict:
        """Symmetrization by summing over S_n: the vertex factor of a push-forward."""
        f = factorial(n)
        return {k: c * f for k, c in self.sym(g, n, x).items()}

    def is_invariant(self, g: int, n: int, x: dict) -> bool:
        return all(self.permute(g, n, p, x) == x for p in self._perm_list(n))

    # ------------------------------------------------------------ bases

    def degree(self, g: int, n: int, term) -> int:
        a, ks = term
        return self.F.deg(g, n, a) + 2 * sum(ks)

    def raw_terms(self, g: int, n: int, degree: int):
        F = self.F
        for a in range(F.dim(g, n)):
            rest = degree - F.deg(g, n, a)
            if rest < 0 or rest & 1:
                continue
            for ks in _compositions(rest // 2, n):
                yield (a, ks)

    def basis(self, g: int, n: int, degree: int) -> list:
        """Invariant basis in one degree: one symmetrized orbit per element."""
        key = (g, n, degree)
        hit = self._basis.get(key)
        if hit is not None:
            return hit
        seen = set()
        out = []
        for t in sorted(self.raw_terms(g, n, degree)):
            if t in seen:
                continue
            x = self.sym(g, n, {t: 1})
            seen.update(x)
            seen.add(t)
            if x:
                out.append(x)
        self._basis[key] = out
        return out

    # ------------------------------------------------------------ operations

    def differential(self, g: int, n: int, x: dict) -> dict:
        return hq_differential(self.F, g, n, x)

    def delta(self, g: int, n: int, x: dict) -> dict:
        """BV operator into slot (g+1, n-2)."""
        out = {}
        if n < 2 or not self.F.has(g + 1, n - 2):
            return out
        for i, j in itertools.combinations(range(1, n + 1), 2):
            add_into(out, twisted_sewing_loop(self.F, g, n, i, j, x))
        return self.sym(g + 1, n - 2, out)

    def bracket(self, g: int, n: int, x: dict, g2: int, n2: int, y: dict) -> dict:
        """Lie bracket into slot (g+g2, n+n2-2), carrying the sign (-1)^|x|."""
        out = {}
        if not n or not n2 or not self.F.has(g + g2, n + n2 - 2):
            return out
        for i in range(1, n + 1):
            for j in range(1, n2 + 1):
                add_into(out, twisted_sewing_pair(self.F, (g, n, i, x), (g2, n2, j, y)))
        if out and self.elem_degree(g, n, x) & 1:
            out = _neg(out)
        return self.sym(g + g2, n + n2 - 2, out)

    def elem_degree(self, g: int, n: int, x: dict):
        degs = {self.degree(g, n, t) for t in x}
        if len(degs) > 1:
            raise ValueError("inhomogeneous element")
        return degs.pop() if degs else None


def bv_delta(dg: DGLA, g: int, n: int, x: dict) -> dict:
    return dg.delta(g, n, x)


def lie_bracket(dg: DGLA, g: int, n: int, x: dict, g2: int, n2: int, y: dict) -> dict:
    return dg.bracket(g, n, x, g2, n2, y)


def _neg(x: dict) -> dict:
    return {k: -c for k, c in x.items()}


# ================================================================ QME

def qme_slots(F: OperadFixture, chi_max: int) -> list:
    """Stable slots with n >= 1 present in F, in (2g-2+n, g) order."""
    out = [t for t in F.types() if t[1] >= 1 and 0 < chi(*t) <= chi_max]
    return sorted(out, key=lambda t: (chi(*t), t[0], t[1]))


def _split_pairs(g: int, n: int):
    """Ordered (g1, n1), (g2, n2) with g1+g2 = g, n1+n2 = n+2, both stable, n_i >= 1."""
    for g1 in range(g + 1):
        for n1 in range(1, n + 2):
            g2, n2 = g - g1, n + 2 - n1
            if n2 >= 1 and chi(g1, n1) > 0 and chi(g2, n2) > 0:
                yield (g1, n1), (g2, n2)


def known_terms(dg: DGLA, V: dict, g: int, n: int) -> dict:
    """Delta V_{g-1,n+2} + 1/2 sum {V', V''}: everything in the QME except D V_{g,n}."""
    out = {}
    if g >= 1 and dg.F.has(g - 1, n + 2):
        if (g - 1, n + 2) not in V:
            raise IncompleteInput(f"slot ({g - 1},{n + 2}) missing")
        add_into(out, dg.delta(g - 1, n + 2, V[(g - 1, n + 2)]))
    for a, b in _split_pairs(g, n):
        if not (dg.F.has(*a) and dg.F.has(*b)):
            continue
        for s in (a, b):
            if s not in V:
                raise IncompleteInput(f"slot {s} missing")
        add_into(out, dg.bracket(a[0], a[1], V[a], b[0], b[1], V[b]), Fraction(1, 2))
    return out


def qme_residual(dg: DGLA, V: dict, chi_max: int) -> dict:
    """Per-slot residual of the quantum master equation for 2g-2+n <= chi_max."""
    out = {}
    for g, n in qme_slots(dg.F, chi_max):
        if (g, n) not in V:
            raise IncompleteInput(f"slot ({g},{n}) missing")
        r = dg.differential(g, n, V[(g, n)])
        add_into(r, known_terms(dg, V, g, n))
        out[(g, n)] = r
    return out


@dataclass
class Obstruction:
    slot: tuple
    residual: dict               # the known terms that D V cannot cancel
    closed: bool                 # D(residual) == 0, so it defines a class
    exact: bool                  # re-checked: False means a nonzero class


@dataclass
class QMESolution:
    V: dict
    solved: list = field(default_factory=list)
    obstruction: Obstruction | None = None


def solve_qme(dg: DGLA, initial: dict, chi_max: int) -> QMESolution:
    """Order-by-order solution of the QME from V_{0,3} = initial.

    Each slot solves D V_{g,n} = -(known terms) over the invariant basis of
    degree 6g-6+2n, taking the basic solution of the eliminated system.  An
    unsolvable slot stops the solver and is returned as an obstruction.
    """
    F = dg.F
    if not F.has(0, 3):
        raise RejectedInput("fixture has no (0,3) slot")
    for t in initial:
        if dg.degree(0, 3, t) != 0:
            raise RejectedInput("initial datum must have degree 0")
    init = dg.sym(0, 3, initial)
    if init != {k: Fraction(v) for k, v in initial.items() if v}:
        raise RejectedInput("initial datum must be S_3-invariant")
    V = {}
    sol = QMESolution(V)
    for g, n in qme_slots(F, chi_max):
        if (g, n) == (0, 3):
            V[(0, 3)] = dict(init)
            if dg.differential(0, 3, init):
                sol.obstruction = Obstruction((0, 3), dg.differential(0, 3, init), True, False)
                return sol
            sol.solved.append((0, 3))
            continue
        rhs = _neg(known_terms(dg, V, g, n))
        basis = dg.basis(g, n, mc_degree(g, n))
        cols = {i: dg.differential(g, n, b) for i, b in enumerate(basis)}
        x = solve(cols, rhs)
        if x is None:
            closed = not dg.differential(g, n, rhs)
            sol.obstruction = Obstruction((g, n), _neg(rhs), closed, is_exact(dg, g, n, rhs))
            return sol
        v = {}
        for i, c in x.items():
            add_into(v, basis[i], c)
        V[(g, n)] = v
        sol.solved.append((g, n))
    return sol


def is_exact(dg: DGLA, g: int, n: int, x: dict) -> bool:
    """Whether an invariant element lies in the image of D (independent re-solve)."""
    if not x:
        return True
    deg = dg.elem_degree(g, n, x)
    basis = dg.basis(g, n, deg + 1)
    cols = {i: dg.differential(g, n, b) for i, b in enumerate(basis)}
    return solve(cols, x) is not None


# ================================================================ marked graphs and push-forward

@dataclass(frozen=True)
class MarkedGraph:
    graph: sg.StableGraph
    marking: tuple               # marking[j] = vertex carrying input j
    aut: int                     # |Aut(G, f)|


def _vertex_maps(G: sg.StableGraph) -> list:
    vo = G.vertex_of()
    out = []
    for p in sg.automorphisms(G):
        out.append(tuple(vo[p[G.vhalf[v][0]]] for v in range(G.nv)))
    return out


def marked_graphs(g: int, n: int, types) -> list:
    """Isomorphism classes of (G, f) with f(j) a vertex of type types[j]."""
    types = [tuple(t) for t in types]
    out = []
    for G in sg.enumerate_stable_graphs(g, n):
        if G.nv != len(types) or sorted(G.vertex_types()) != sorted(types):
            continue
        vt = G.vertex_types()
        vmaps = _vertex_maps(G)
        seen = set()
        for f in itertools.permutations(range(G.nv)):
            if any(vt[f[j]] != types[j] for j in range(len(types))) or f in seen:
                continue
            orbit = {tuple(m[v] for v in f) for m in vmaps}
            seen |= orbit
            stab = sum(1 for m in vmaps if all(m[v] == v for v in f))
            out.append(MarkedGraph(G, f, stab))
    return out


def degree_identity(G: sg.StableGraph) -> int:
    """2|E| - 2|V| + 2 - 2(g - sum g(v)); zero for every connected graph."""
    return 2 * len(G.edges) - 2 * G.nv + 2 - 2 * (G.g - sum(G.genus))


def _place(dg: DGLA, space: FPSpace, G: sg.StableGraph, factors: list, coeff, out: dict):
    """Add coeff * D_G (x) factors[0] (x) ... (vertex order) as raw FP terms on canonical G."""
    gi = space.index[G]
    H = len(G.half_edges())
    for combo in itertools.product(*(f.items() for f in factors)):
        keys = tuple(t[0][0] for t in combo)
        ks = [0] * H
        c = coeff
        for v, ((a, kv), cv) in enumerate(combo):
            c *= cv
            for s, h in enumerate(G.vhalf[v]):
                ks[h] = kv[s]
        add_term(out, (gi, keys, tuple(ks)), c)


def linfty_k(dg: DGLA, space: FPSpace, gammas: list) -> FeynmanElement:
    """K_m: sum over marked graphs of type space with vertices gammas[j] = (g_j, n_j, element).

    Each marking carries 1/|Aut(G)|, which sums to 1/|Aut(G, f)| per class.
    """
    if not gammas:
        raise RejectedInput("need at least one input")
    types = [(gj, nj) for gj, nj, _ in gammas]
    syms = [dg.sym_sum(gj, nj, x) for gj, nj, x in gammas]
    raw = {}
    for G in sg.enumerate_stable_graphs(space.g, space.n):
        if G.nv != len(types) or sorted(G.vertex_types()) != sorted(types):
            continue
        vt = G.vertex_types()
        weight = Fraction(1, sg.automorphism_order(G))
        for f in itertools.permutations(range(G.nv)):
            if any(vt[f[j]] != types[j] for j in range(len(types))):
                continue
            inv = [0] * G.nv
            for j, v in enumerate(f):
                inv[v] = j
            for combo in itertools.product(*(s.items() for s in syms)):
                par = [dg.degree(gj, nj, t) & 1 for (gj, nj), (t, _) in zip(types, combo)]
                sign = koszul_sort_sign(par, list(f))
                factors = [{combo[inv[v]][0]: combo[inv[v]][1]} for v in range(G.nv)]
                _place(dg, space, G, factors, sign * weight, raw)
    return space.element(raw)


def pushforward_mc(dg: DGLA, V: dict, space: FPSpace) -> FeynmanElement:
    """sum_G 1/|Aut G| D_G (x) tensor of V^sym over the vertices, in FP(g, n).

    V^sym at a vertex with n(v) half-edges is the S_n-sum, n(v)! times the
    invariant representative, since Delta and the bracket act on coinvariants.
    """
    raw = {}
    for G in sg.enumerate_stable_graphs(space.g, space.n):
        vt = G.vertex_types()
        if any(t not in V for t in vt):
            if any(dg.F.has(*t) and t[1] >= 1 for t in vt):
                missing = [t for t in vt if t not in V]
                raise IncompleteInput(f"slots {missing} missing")
            continue
        factors = [dg.sym_sum(t[0], t[1], V[t]) for t in vt]
        _place(dg, space, G, factors, Fraction(1, sg.automorphism_order(G)), raw)
    return space.element(raw)


def pushforward_closed(dg: DGLA, V: dict, g: int, n: int, depth: int | None = None):
    """(FP total differential of pushforward_mc(V) at (g, n), the element itself)."""
    depth = 3 * g - 3 + n + 1 if depth is None else depth
    space = FPSpace(dg.F, g, n, depth)
    elt = pushforward_mc(dg, V, space)
    return space.differential(elt), elt, space


# ================================================================ coefficient mode

def graph_code(G: sg.StableGraph) -> str:
    """One-line canonical encoding: vertices g:halfedges, legs, edges."""
    vs = ";".join(f"{gv}:" + ",".join(map(str, hs)) for gv, hs in zip(G.genus, G.vhalf))
    legs = ",".join(map(str, G.legs))
    es = ";".join(f"{a}-{b}" for a, b in G.edges)
    return f"V[{vs}] L[{legs}] E[{es}]"


def pushforward_records(g: int, n: int) -> list:
    """Per-graph records of the push-forward sum: weight 1/|Aut G|, vertex labels, edges, degree."""
    out = []
    for G in sg.enumerate_stable_graphs(g, n):
        deg = 2 * len(G.edges) + sum(mc_degree(gv, len(hs)) for gv, hs in zip(G.genus, G.vhalf))
        out.append({
            "graph": graph_code(G),
            "weight": Fraction(1, sg.automorphism_order(G)),
            "vertices": [(gv, len(hs)) for gv, hs in zip(G.genus, G.vhalf)],
            "edges": len(G.edges),
            "degree": deg,
            "degree_identity": degree_identity(G),
        })
    return out


def star_coefficients(g: int, n: int) -> dict:
    """Coefficient-mode star term: {k-vector: vertex coefficient v_{g,n}^k}."""
    from .cei import string_vertex_coefficient
    from .intersection import on_dimension_vectors
    out = {}
    for ks in on_dimension_vectors(g, n):
        for p in sorted(set(itertools.permutations(ks))):
            out[p] = string_vertex_coefficient(g, p)
    return out


# ================================================================ identity checks

@dataclass
class Check:
    name: str
    checked: int = 0
    witness: object = None

    @property
    def ok(self) -> bool:
        return self.witness is None

    def fail(self, w):
        if self.witness is None:
            self.witness = w


def _slots(F: OperadFixture, chi_max: int) -> list:
    return [t for t in qme_slots(F, chi_max)]


def _elements(dg: DGLA, slot, max_degree: int) -> list:
    return [(d, x) for d in range(max_degree + 1) for x in dg.basis(*slot, d)]


def _target(a, b):
    return (a[0] + b[0], a[1] + b[1] - 2)


def check_delta(dg: DGLA, chi_max: int = 4, max_degree: int = 4) -> list:
    """Delta^2 = 0 and D Delta + Delta D = 0 on invariant bases."""
    sq, comm = Check("Delta^2 = 0"), Check("[D, Delta] = 0")
    F = dg.F
    for g, n in _slots(F, chi_max):
        if n < 2 or not F.has(g + 1, n - 2):
            continue
        for d, x in _elements(dg, (g, n), max_degree):
            dx = dg.delta(g, n, x)
            if n >= 4 and F.has(g + 2, n - 4):
                sq.checked += 1
                if dg.delta(g + 1, n - 2, dx):
                    sq.fail(((g, n), x))
            comm.checked += 1
            lhs = dg.differential(g + 1, n - 2, dx)
            add_into(lhs, dg.delta(g, n, dg.differential(g, n, x)))
            if lhs:
                comm.fail(((g, n), x, lhs))
    return [sq, comm]


def _bracket_pairs(F, chi_max):
    slots = _slots(F, chi_max)
    return [(a, b) for a in slots for b in slots if chi(*a) + chi(*b) <= chi_max and F.has(*_target(a, b))]


def check_bracket(dg: DGLA, chi_max: int = 4, max_degree: int = 2) -> list:
    """Shifted antisymmetry and the derivation rule D{x,y} = {Dx,y} + (-1)^{|x|+1}{x,Dy}."""
    anti, der = Check("antisymmetry"), Check("D derivation of bracket")
    for a, b in _bracket_pairs(dg.F, chi_max):
        t = _target(a, b)
        for dx, x in _elements(dg, a, max_degree):
            for dy, y in _elements(dg, b, max_degree):
                xy = dg.bracket(*a, x, *b, y)
                yx = dg.bracket(*b, y, *a, x)
                anti.checked += 1
                s = -1 if ((dx + 1) * (dy + 1)) & 1 else 1
                if xy != {k: -s * c for k, c in yx.items()}:
                    anti.fail((a, b, x, y))
                der.checked += 1
                lhs = dg.differential(*t, xy)
                add_into(lhs, dg.bracket(*a, dg.differential(*a, x), *b, y), -1)
                add_into(lhs, dg.bracket(*a, x, *b, dg.differential(*b, y)), -1 if dx & 1 else 1)
                if lhs:
                    der.fail((a, b, x, y, lhs))
    return [anti, der]


def check_jacobi(dg: DGLA, chi_max: int = 4, max_degree: int = 1) -> Check:
    """(-1)^{|x|'|z|'}{x,{y,z}} + cyclic = 0 in shifted degrees."""
    out = Check("Jacobi")
    F = dg.F
    slots = _slots(F, chi_max)
    triples = [(a, b, c) for a in slots for b in slots for c in slots
               if chi(*a) + chi(*b) + chi(*c) <= chi_max and a <= b <= c]
    for a, b, c in triples:
        if not F.has(a[0] + b[0] + c[0], a[1] + b[1] + c[1] - 4):
            continue
        for (dx, x), (dy, y), (dz, z) in itertools.product(*(_elements(dg, s, max_degree) for s in (a, b, c))):
            px, py, pz = dx + 1, dy + 1, dz + 1
            tot = {}
            add_into(tot, dg.bracket(*a, x, *_target(b, c), dg.bracket(*b, y, *c, z)), (-1) ** (px * pz % 2))
            add_into(tot, dg.bracket(*b, y, *_target(c, a), dg.bracket(*c, z, *a, x)), (-1) ** (py * px % 2))
            add_into(tot, dg.bracket(*c, z, *_target(a, b), dg.bracket(*a, x, *b, y)), (-1) ** (pz * py % 2))
            out.checked += 1
            if tot:
                out.fail((a, b, c, x, y, z, tot))
    return out


def check_pushforward(dg: DGLA, V: dict, slots) -> list:
    """Closedness of the push-forward and the degree 6g-6+2n of each of its terms."""
    closed, deg = Check("push-forward closed"), Check("push-forward degree")
    for g, n in slots:
        d, e, space = pushforward_closed(dg, V, g, n)
        closed.checked += 1
        if d:
            closed.fail(((g, n), d.terms))
        for term in e.terms:
            deg.checked += 1
            if space.degree(term) != 6 * g - 6 + 2 * n:
                deg.fail(((g, n), term))
    return [closed, deg]
