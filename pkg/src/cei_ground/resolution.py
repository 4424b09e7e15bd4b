"""Simplicial resolution of the Feynman compactification over a fixture.

Cells live over labelled (rigid) graphs: a base graph G_0, a strict chain of
cumulative contracted edge sets S_1 < ... < S_k, one cell label per edge, one
fixture basis key per vertex and one u-exponent per half-edge.  Edges in S_k
are circle type (labels 1, eps) and the rest are disk type (1, eps, D).

Tensor order for Koszul signs: edge labels first, sorted by half-edge pair,
then the vertex factors in vertex order.

Sign conventions (all validated by the checks below):
    internal:  d(D) = eps,  d(1_e) = -(u_+ + u_-) eps_e,  plus vertex d + uB
    faces:     face 0 = delta2, faces 1..k-1 = delta3, face k = delta1
    total:     (-1)^k d_int - sum_j (-1)^j face_j
    homotopy:  h = (-1)^k * (append the qualifying edges)
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from . import stable_graphs as sg
from .feynman import FPSpace, FeynmanElement, _apply_plan, _exponents
from .linalg import add_term, add_into
from .operad_fixture import OperadFixture, pg_B, pg_contract, pg_d, pg_degree

ONE, EPS, DISK = 0, 1, 2
LABEL_NAMES = ("1", "eps", "D")
LABEL_DEGREE = (0, 1, 2)


class RejectedInput(ValueError):
    pass


@dataclass(frozen=True)
class EdgeCell:
    """A cell of C_*(S^1) (circle) or C_*(D) (disk)."""
    label: int
    disk: bool = True

    def __post_init__(self):
        if self.label not in (ONE, EPS, DISK):
            raise RejectedInput(f"unknown label {self.label}")
        if self.label == DISK and not self.disk:
            raise RejectedInput("the 2-cell only exists on a disk")

    @property
    def degree(self) -> int:
        return LABEL_DEGREE[self.label]

    def boundary(self) -> dict:
        if self.label == DISK:
            return {EdgeCell(EPS, True): 1}
        return {}

    def as_disk(self) -> "EdgeCell":
        return EdgeCell(self.label, True)

    def __str__(self):
        return LABEL_NAMES[self.label]


@dataclass(frozen=True)
class ResolutionCell:
    graph: sg.StableGraph
    steps: tuple        # cumulative frozensets of contracted edge pairs
    labels: tuple       # ((h1, h2), label) sorted by pair
    keys: tuple         # fixture basis index per vertex
    ks: tuple           # ((half-edge, exponent), ...) sorted by half-edge

    @property
    def k(self) -> int:
        return len(self.steps)

    def circle_edges(self) -> frozenset:
        return self.steps[-1] if self.steps else frozenset()

    def edge_cells(self) -> list:
        circ = self.circle_edges()
        return [EdgeCell(lab, p not in circ) for p, lab in self.labels]

    def chain_graphs(self) -> list:
        G = self.graph
        return [G] + [sg.contract_edges(G, [G.edges.index(p) for p in S]).target for S in self.steps]


def cell_problems(cell: ResolutionCell) -> list:
    out = []
    G = cell.graph
    if [p for p, _ in cell.labels] != list(G.edges):
        out.append("labels do not match the edges")
    prev = frozenset()
    for S in cell.steps:
        if not prev < S or not S <= set(G.edges):
            out.append("steps are not a strict chain of edge sets")
        prev = S
    circ = cell.circle_edges()
    for p, lab in cell.labels:
        if lab == DISK and p in circ:
            out.append(f"circle-type edge {p} labelled D")
    if len(cell.keys) != G.nv:
        out.append("one key per vertex required")
    if sorted(h for h, _ in cell.ks) != sorted(G.half_edges()):
        out.append("one exponent per half-edge required")
    return out


def cell_degree(F: OperadFixture, cell: ResolutionCell) -> int:
    return (cell.k + sum(LABEL_DEGREE[l] for _, l in cell.labels) + pg_degree(F, cell.graph, cell.keys)
            + 2 * sum(k for _, k in cell.ks))


def _relabel(cell, labels=None, keys=None, ks=None, graph=None, steps=None):
    return ResolutionCell(cell.graph if graph is None else graph,
                          cell.steps if steps is None else steps,
                          cell.labels if labels is None else labels,
                          cell.keys if keys is None else keys,
                          cell.ks if ks is None else ks)


def _set_label(labels: tuple, idx: int, lab: int) -> tuple:
    return labels[:idx] + ((labels[idx][0], lab),) + labels[idx + 1:]


def _lower(ks: tuple, h: int) -> tuple:
    return tuple((a, k - 1 if a == h else k) for a, k in ks)


# ================================================================ differentials

def internal_differential(F: OperadFixture, cell: ResolutionCell) -> dict:
    """Vertex d + uB, d(D) = eps, and d(1_e) = -(u_+ + u_-) eps on every edge labelled 1."""
    out = {}
    G, kd = cell.graph, dict(cell.ks)
    pre = 0
    for idx, (pair, lab) in enumerate(cell.labels):
        s = -1 if pre & 1 else 1
        if lab == DISK:
            add_term(out, _relabel(cell, labels=_set_label(cell.labels, idx, EPS)), s)
        elif lab == ONE:
            for h in pair:
                if kd[h]:
                    add_term(out, _relabel(cell, labels=_set_label(cell.labels, idx, EPS),
                                           ks=_lower(cell.ks, h)), -s)
        pre += LABEL_DEGREE[lab]
    sv = -1 if pre & 1 else 1
    for k2, c in pg_d(F, G, {cell.keys: 1}).items():
        add_term(out, _relabel(cell, keys=k2), sv * c)
    for h, k in cell.ks:
        if not k:
            continue
        low = _lower(cell.ks, h)
        for k2, c in pg_B(F, G, h, {cell.keys: 1}).items():
            add_term(out, _relabel(cell, keys=k2, ks=low), sv * c)
    return out


def delta1(cell: ResolutionCell) -> dict:
    """Forget G_k: the edges of S_k - S_{k-1} become disk type with the same label."""
    if cell.k < 1:
        raise RejectedInput("delta1 needs k >= 1")
    return {_relabel(cell, steps=cell.steps[:-1]): 1}


def delta3(cell: ResolutionCell, j: int) -> dict:
    """Delete G_j (1 <= j <= k-1); decorations unchanged."""
    if not 1 <= j <= cell.k - 1:
        raise RejectedInput(f"delta3 index {j} out of range for k = {cell.k}")
    return {_relabel(cell, steps=cell.steps[:j - 1] + cell.steps[j:]): 1}


def _sew_edge(F, G, labels, keys, kd, pair, coeff, out):
    """Koszul equivalence at one circle edge: 1 -> sewing, eps -> sewing after B_+."""
    h1, h2 = pair
    if kd[h1] or kd[h2]:
        return None
    idx = [p for p, _ in labels].index(pair)
    lab = labels[idx][1]
    rest = labels[:idx] + labels[idx + 1:]
    e = G.edges.index(pair)
    if lab == ONE:
        elem = {keys: coeff}
    else:
        before = sum(LABEL_DEGREE[l] for _, l in labels[:idx])
        others = sum(LABEL_DEGREE[l] for _, l in rest)
        s = -1 if (before + others) & 1 else 1
        elem = {k2: c * s * coeff for k2, c in pg_B(F, G, h1, {keys: 1}).items()}
    con, res = pg_contract(F, G, e, elem)
    kd2 = {h: k for h, k in kd.items() if h not in pair}
    for k2, c in res.items():
        add_term(out, (rest, k2, tuple(sorted(kd2.items()))), c)
    return con.target


def delta2(F: OperadFixture, cell: ResolutionCell) -> dict:
    """Forget G_0 by sewing the edges of S_1 (label 1) or twisted-sewing them (label eps)."""
    if cell.k < 1:
        raise RejectedInput("delta2 needs k >= 1")
    S1 = cell.steps[0]
    cur = {(cell.labels, cell.keys, cell.ks): Fraction(1)}
    G = cell.graph
    for pair in sorted(S1):
        nxt = {}
        T = None
        for (labels, keys, ks), c in cur.items():
            t = _sew_edge(F, G, labels, keys, dict(ks), pair, c, nxt)
            T = t or T
        if not nxt:
            return {}
        G, cur = T, nxt
    steps = tuple(S - S1 for S in cell.steps[1:])
    out = {}
    for (labels, keys, ks), c in cur.items():
        add_term(out, ResolutionCell(G, steps, labels, keys, ks), c)
    return out


def faces(F: OperadFixture, cell: ResolutionCell) -> list:
    """[(j, face_j(cell))] with face 0 = delta2, 1..k-1 = delta3, k = delta1."""
    k = cell.k
    if k == 0:
        return []
    out = [(0, delta2(F, cell))]
    out += [(j, delta3(cell, j)) for j in range(1, k)]
    out.append((k, delta1(cell)))
    return out


def simplicial_part(cell: ResolutionCell) -> dict:
    """d_0 = -sum_{j >= 1} (-1)^j face_j: the differential delta1 + delta3 with signs."""
    out = {}
    k = cell.k
    for j in range(1, k + 1):
        f = delta1(cell) if j == k else delta3(cell, j)
        add_into(out, f, -1 if j % 2 == 0 else 1)
    return out


def perturbation(F: OperadFixture, cell: ResolutionCell) -> dict:
    """(-1)^k d_int - delta2: everything in the total differential except d_0."""
    out = {}
    add_into(out, internal_differential(F, cell), -1 if cell.k & 1 else 1)
    if cell.k:
        add_into(out, delta2(F, cell), -1)
    return out


def total_differential(F: OperadFixture, cell: ResolutionCell) -> dict:
    out = perturbation(F, cell)
    add_into(out, simplicial_part(cell))
    return out


def apply(op, x: dict) -> dict:
    out = {}
    for cell, c in x.items():
        add_into(out, op(cell), c)
    return out


# ================================================================ retract data

def homotopy_h(cell: ResolutionCell) -> dict:
    """Append G_{k+1} contracting the disk edges labelled 1 or eps; zero if there are none."""
    circ = cell.circle_edges()
    q = frozenset(p for p, lab in cell.labels if p not in circ and lab != DISK)
    if not q:
        return {}
    return {_relabel(cell, steps=cell.steps + (circ | q,)): -1 if cell.k & 1 else 1}


def iota(G: sg.StableGraph, keys: tuple, ks) -> ResolutionCell:
    """Decorate every edge by D."""
    if not isinstance(ks, dict):
        ks = dict(enumerate(ks))
    return ResolutionCell(G, (), tuple((p, DISK) for p in G.edges), tuple(keys), tuple(sorted(ks.items())))


def pi(cell: ResolutionCell):
    """Projection onto the D-component at simplicial degree 0, as (graph, keys, ks) or None."""
    if cell.k or any(lab != DISK for _, lab in cell.labels):
        return None
    return (cell.graph, cell.keys, cell.ks)


def _ipi(x: dict) -> dict:
    out = {}
    for cell, c in x.items():
        if pi(cell) is not None:
            add_term(out, cell, c)
    return out


def _chains(edges: tuple):
    """All strict chains of nonempty cumulative subsets of edges (including the empty chain)."""
    subsets = [frozenset(c) for r in range(1, len(edges) + 1) for c in itertools.combinations(edges, r)]

    def grow(prefix):
        yield tuple(prefix)
        last = prefix[-1] if prefix else frozenset()
        for S in subsets:
            if last < S:
                yield from grow(prefix + [S])
    yield from grow([])


def cells_over(F: OperadFixture, G: sg.StableGraph, depth: int, keys=None):
    """All basis cells over G with u-exponents at most depth."""
    H = sorted(G.half_edges())
    types = [(G.genus[v], len(G.vhalf[v])) for v in range(G.nv)]
    key_list = list(itertools.product(*(range(F.dim(*t)) for t in types))) if keys is None else keys
    for steps in _chains(G.edges):
        circ = steps[-1] if steps else frozenset()
        choices = [(ONE, EPS) if p in circ else (ONE, EPS, DISK) for p in G.edges]
        for labs in itertools.product(*choices):
            labels = tuple(zip(G.edges, labs))
            for key in key_list:
                for ex in _exponents(len(H), depth):
                    yield ResolutionCell(G, steps, labels, tuple(key), tuple(zip(H, ex)))


@dataclass
class Check:
    name: str
    checked: int
    witness: object = None

    @property
    def ok(self) -> bool:
        return self.witness is None

    def __bool__(self):
        return self.ok


def retract_check(G0: sg.StableGraph, F: OperadFixture, depth: int, keys=None) -> Check:
    """id - i pi = [d_0, h] on every basis cell over G0."""
    if len(G0.edges) > 3:
        raise RejectedInput("retract check is limited to graphs with at most 3 edges")
    n = 0
    for cell in cells_over(F, G0, depth, keys):
        n += 1
        lhs = apply(simplicial_part, homotopy_h(cell))
        add_into(lhs, apply(homotopy_h, simplicial_part(cell)))
        rhs = {cell: 1}
        add_into(rhs, _ipi({cell: 1}), -1)
        diff = dict(lhs)
        add_into(diff, rhs, -1)
        if diff:
            return Check("retract", n, (cell, diff))
    return Check("retract", n)


def check_total_d_squared(G0: sg.StableGraph, F: OperadFixture, depth: int, keys=None) -> Check:
    n = 0
    for cell in cells_over(F, G0, depth, keys):
        n += 1
        dd = apply(lambda c: total_differential(F, c), total_differential(F, cell))
        if dd:
            return Check("total d^2", n, (cell, dd))
    return Check("total d^2", n)


def check_delta2_chain_map(G0: sg.StableGraph, F: OperadFixture, depth: int, keys=None) -> Check:
    n = 0
    for cell in cells_over(F, G0, depth, keys):
        if not cell.k:
            continue
        n += 1
        a = apply(lambda c: delta2(F, c), internal_differential(F, cell))
        b = apply(lambda c: internal_differential(F, c), delta2(F, cell))
        add_into(a, b, -1)
        if a:
            return Check("delta2 chain map", n, (cell, a))
    return Check("delta2 chain map", n)


# ================================================================ perturbation

def _series(F, x: dict, limit: int) -> list:
    """Terms (h' p)^m x for m = 0, 1, ... with h' = -h, until they vanish."""
    out = [x]
    cur = x
    for _ in range(limit):
        cur = apply(homotopy_h, apply(lambda c: perturbation(F, c), cur))
        cur = {c: -v for c, v in cur.items()}
        if not cur:
            return out
        out.append(cur)
    raise RuntimeError("perturbation series did not terminate")


def _bound(G: sg.StableGraph) -> int:
    return 2 * len(G.edges) + 2


def i_sharp(F: OperadFixture, G: sg.StableGraph, keys: tuple, ks) -> dict:
    """sum_m (h' p)^m i: the perturbed inclusion."""
    out = {}
    for t in _series(F, {iota(G, keys, ks): 1}, _bound(G)):
        add_into(out, t)
    return out


def _project(x: dict) -> dict:
    """pi applied to a sum of cells: {(graph, keys, ks): coef}."""
    out = {}
    for cell, c in x.items():
        p = pi(cell)
        if p is not None:
            add_term(out, p, c)
    return out


def pi_sharp(F: OperadFixture, x: dict) -> dict:
    """pi sum_m (p h')^m: the perturbed projection."""
    out = {}
    cur = x
    bound = max((_bound(c.graph) for c in x), default=0)
    for _ in range(bound + 1):
        add_into(out, _project(cur))
        cur = apply(lambda c: perturbation(F, c), apply(homotopy_h, cur))
        cur = {c: -v for c, v in cur.items()}
        if not cur:
            return out
    raise RuntimeError("perturbation series did not terminate")


def transferred_differential(F: OperadFixture, G: sg.StableGraph, keys: tuple, ks) -> dict:
    """pi p sum_m (h' p)^m i on one rigid FP term: the perturbed differential."""
    out = {}
    for t in _series(F, {iota(G, keys, ks): 1}, _bound(G)):
        add_into(out, _project(apply(lambda c: perturbation(F, c), t)))
    return out


def rigid_fp_differential(F: OperadFixture, G: sg.StableGraph, keys: tuple, ks) -> dict:
    """FP total differential on a labelled graph, before passing to Aut-coinvariants."""
    if not isinstance(ks, dict):
        ks = dict(enumerate(ks))
    kt = tuple(sorted(ks.items()))
    out = {}
    for k2, c in pg_d(F, G, {keys: 1}).items():
        add_term(out, (G, k2, kt), c)
    for h, k in kt:
        if k:
            for k2, c in pg_B(F, G, h, {keys: 1}).items():
                add_term(out, (G, k2, _lower(kt, h)), c)
    for e, (h1, h2) in enumerate(G.edges):
        if ks[h1] or ks[h2]:
            continue
        con, res = pg_contract(F, G, e, pg_B(F, G, h1, {keys: 1}))
        rest = tuple((h, k) for h, k in kt if h not in (h1, h2))
        for k2, c in res.items():
            add_term(out, (con.target, k2, rest), c)
    return out


def to_feynman(space: FPSpace, x: dict) -> FeynmanElement:
    """Rigid terms {(graph, keys, ks)} -> normal-form element of FP(g, n)."""
    raw = {}
    for (G, keys, ks), c in x.items():
        plan = space.plan_for(G)
        s, k3, e3 = _apply_plan(space.F, G, plan, keys, dict(ks))
        add_term(raw, (plan.target, k3, e3), s * c)
    return space.element(raw)


@dataclass
class PerturbationReport:
    checked: int
    differential: Check
    i_chain: Check
    pi_chain: Check
    retraction: Check

    @property
    def ok(self) -> bool:
        return all(c.ok for c in (self.differential, self.i_chain, self.pi_chain, self.retraction))


def perturbed_differential(G0: sg.StableGraph, F: OperadFixture, depth: int, keys=None) -> PerturbationReport:
    """Compare the transferred differential with the FP one on every rigid term over G0.

    Also checks that i# and pi# are chain maps and that pi# i# = id.
    """
    if len(G0.edges) > 3:
        raise RejectedInput("perturbation check is limited to graphs with at most 3 edges")
    space = FPSpace(F, G0.g, G0.n, depth)
    H = sorted(G0.half_edges())
    types = [(G0.genus[v], len(G0.vhalf[v])) for v in range(G0.nv)]
    key_list = list(itertools.product(*(range(F.dim(*t)) for t in types))) if keys is None else keys
    checks = {name: Check(name, 0) for name in ("differential", "i# chain map", "pi# chain map", "pi# i# = id")}
    n = 0

    def fail(name, w):
        if checks[name].ok:
            checks[name].witness = w

    for key in key_list:
        for ex in _exponents(len(H), depth):
            n += 1
            key = tuple(key)
            ks = dict(zip(H, ex))
            rig = rigid_fp_differential(F, G0, key, ks)
            tr = transferred_differential(F, G0, key, ks)
            if tr != rig or to_feynman(space, tr) != space.differential(to_feynman(space, {(G0, key, tuple(sorted(ks.items()))): 1})):
                fail("differential", (key, ex, tr, rig))
            isharp = i_sharp(F, G0, key, ks)
            lhs = apply(lambda c: total_differential(F, c), isharp)
            rhs = {}
            for (G2, k2, ks2), c in rig.items():
                add_into(rhs, i_sharp(F, G2, k2, dict(ks2)), c)
            add_into(lhs, rhs, -1)
            if lhs:
                fail("i# chain map", (key, ex, lhs))
            back = pi_sharp(F, isharp)
            if back != {(G0, key, tuple(sorted(ks.items()))): 1}:
                fail("pi# i# = id", (key, ex, back))
    # pi# chain map on every cell over G0
    m = 0
    for cell in cells_over(F, G0, depth, keys):
        m += 1
        lhs = pi_sharp(F, total_differential(F, cell))
        rhs = {}
        for (G2, k2, ks2), c in pi_sharp(F, {cell: 1}).items():
            add_into(rhs, rigid_fp_differential(F, G2, k2, dict(ks2)), c)
        add_into(lhs, rhs, -1)
        if lhs:
            fail("pi# chain map", (cell, lhs))
            break
    for name, c in checks.items():
        c.checked = m if name == "pi# chain map" else n
    return PerturbationReport(n, checks["differential"], checks["i# chain map"], checks["pi# chain map"],
                              checks["pi# i# = id"])


def edge_term(F: OperadFixture, G: sg.StableGraph, keys: tuple, ks) -> dict:
    """pi delta2 h d i on one rigid term: the part of the transferred differential that sews edges."""
    out = {}
    start = internal_differential(F, iota(G, keys, ks))
    for cell, c in apply(homotopy_h, start).items():
        for p, v in _project(delta2(F, cell)).items():
            add_term(out, p, v * c)
    return out


def sewing_term(F: OperadFixture, G: sg.StableGraph, keys: tuple, ks) -> dict:
    """rho_e on a one-edge graph: sewing after the circle operator at the first half-edge."""
    if len(G.edges) != 1:
        raise RejectedInput("sewing_term needs a graph with one edge")
    if not isinstance(ks, dict):
        ks = dict(enumerate(ks))
    h1, h2 = G.edges[0]
    if ks[h1] or ks[h2]:
        return {}
    con, res = pg_contract(F, G, 0, pg_B(F, G, h1, {tuple(keys): 1}))
    rest = tuple(sorted((h, k) for h, k in ks.items() if h not in (h1, h2)))
    return {(con.target, k2, rest): c for k2, c in res.items() if c}
