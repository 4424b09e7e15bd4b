"""Stable graphs: enumeration, canonical forms, automorphisms and contractions.

A graph is stored with explicit half-edge ids.  Legs are numbered 1..n and are
fixed by every isomorphism.  Canonical graphs use half-edge ids 0..H-1 with the
legs first (leg i is half-edge i-1) followed by the edges in canonical order.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import factorial


class UnstableError(ValueError):
    pass


def is_stable_type(g: int, n: int) -> bool:
    return g >= 0 and n >= 0 and 2 * g - 2 + n > 0


@dataclass(frozen=True)
class StableGraph:
    genus: tuple          # genus of each vertex
    vhalf: tuple          # sorted half-edge ids at each vertex
    legs: tuple           # legs[i] is the half-edge of leg i+1
    edges: tuple          # sorted tuple of (h1, h2) with h1 < h2

    @property
    def n(self) -> int:
        return len(self.legs)

    @property
    def g(self) -> int:
        return sum(self.genus) + len(self.edges) - len(self.genus) + 1

    @property
    def nv(self) -> int:
        return len(self.genus)

    def valence(self, v: int) -> int:
        return len(self.vhalf[v])

    def vertex_of(self) -> dict:
        return {h: v for v, hs in enumerate(self.vhalf) for h in hs}

    def partner(self) -> dict:
        out = {}
        for a, b in self.edges:
            out[a] = b
            out[b] = a
        return out

    def half_edges(self) -> list:
        return sorted(h for hs in self.vhalf for h in hs)

    def vertex_types(self) -> list:
        return [(self.genus[v], len(self.vhalf[v])) for v in range(self.nv)]

    def edge_vertices(self) -> list:
        vo = self.vertex_of()
        return [(vo[a], vo[b]) for a, b in self.edges]

    def is_loop(self, e: int) -> bool:
        vo = self.vertex_of()
        a, b = self.edges[e]
        return vo[a] == vo[b]

    def __str__(self) -> str:
        return to_text(self)


def make_graph(genus, vhalf, legs, edges) -> StableGraph:
    return StableGraph(tuple(genus), tuple(tuple(sorted(hs)) for hs in vhalf),
                       tuple(legs), tuple(sorted(tuple(sorted(e)) for e in edges)))


def star(g: int, n: int) -> StableGraph:
    return make_graph([g], [range(n)], range(n), [])


def check_graph(G: StableGraph) -> list:
    """Return a list of violated invariants (empty when G is a valid stable graph)."""
    problems = []
    seen = {}
    for v, hs in enumerate(G.vhalf):
        for h in hs:
            if h in seen:
                problems.append(f"half-edge {h} at two vertices")
            seen[h] = v
    used = list(G.legs) + [h for e in G.edges for h in e]
    if sorted(used) != sorted(seen):
        problems.append("half-edges not partitioned into legs and edges")
    for v in range(G.nv):
        if 2 * G.genus[v] - 2 + len(G.vhalf[v]) <= 0:
            problems.append(f"vertex {v} unstable")
    # connectedness
    if G.nv:
        adj = {v: set() for v in range(G.nv)}
        for a, b in G.edge_vertices():
            adj[a].add(b)
            adj[b].add(a)
        stack, reach = [0], {0}
        while stack:
            for w in adj[stack.pop()]:
                if w not in reach:
                    reach.add(w)
                    stack.append(w)
        if len(reach) != G.nv:
            problems.append("disconnected")
    return problems


# ---------------------------------------------------------------- canonical form

def _adjacency(G: StableGraph):
    mult = {}
    for a, b in G.edge_vertices():
        key = (min(a, b), max(a, b))
        mult[key] = mult.get(key, 0) + 1
    return mult


def _initial_colors(G: StableGraph, mult) -> list:
    vo = G.vertex_of()
    leg_at = [[] for _ in range(G.nv)]
    for i, h in enumerate(G.legs):
        leg_at[vo[h]].append(i)
    return [(G.genus[v], len(G.vhalf[v]), tuple(leg_at[v]), mult.get((v, v), 0))
            for v in range(G.nv)]


def _refine(colors: list, mult, nv: int) -> list:
    """Colour refinement; returns integer cell indices (stable partition)."""
    cells = _rank(colors)
    while True:
        sig = []
        for v in range(nv):
            nb = []
            for w in range(nv):
                if w != v:
                    m = mult.get((min(v, w), max(v, w)), 0)
                    if m:
                        nb.append((cells[w], m))
            sig.append((cells[v], tuple(sorted(nb))))
        new = _rank(sig)
        if len(set(new)) == len(set(cells)):
            return new
        cells = new


def _rank(keys: list) -> list:
    order = sorted(set(keys))
    pos = {k: i for i, k in enumerate(order)}
    return [pos[k] for k in keys]


def _encode(G: StableGraph, order: tuple, mult) -> tuple:
    pos = {v: i for i, v in enumerate(order)}
    vo = G.vertex_of()
    gen = tuple(G.genus[v] for v in order)
    legs = tuple(pos[vo[h]] for h in G.legs)
    edges = []
    for (a, b), m in mult.items():
        p, q = sorted((pos[a], pos[b]))
        edges.extend([(p, q)] * m)
    return gen, legs, tuple(sorted(edges))


def _orderings(G: StableGraph, mult):
    """All vertex orderings reachable by individualisation-refinement."""
    colors = _initial_colors(G, mult)
    nv = G.nv

    def rec(cols):
        cells = _refine(cols, mult, nv)
        if len(set(cells)) == nv:
            yield tuple(sorted(range(nv), key=lambda v: cells[v]))
            return
        counts = {}
        for c in cells:
            counts[c] = counts.get(c, 0) + 1
        target = min(c for c, k in counts.items() if k > 1)
        for v in range(nv):
            if cells[v] == target:
                new = [(c, 1) for c in cells]
                new[v] = (target, 0)
                yield from rec(new)

    yield from rec(colors)


def _search(G: StableGraph):
    mult = _adjacency(G)
    best, orders = None, []
    for order in set(_orderings(G, mult)):
        code = _encode(G, order, mult)
        if best is None or code < best:
            best, orders = code, [order]
        elif code == best:
            orders.append(order)
    return best, sorted(orders)


def _graph_from_code(code) -> StableGraph:
    gen, legpos, edges = code
    n = len(legpos)
    vhalf = [[] for _ in gen]
    for i, p in enumerate(legpos):
        vhalf[p].append(i)
    elist = []
    for t, (p, q) in enumerate(edges):
        h1, h2 = n + 2 * t, n + 2 * t + 1
        vhalf[p].append(h1)
        vhalf[q].append(h2)
        elist.append((h1, h2))
    return make_graph(gen, vhalf, range(n), elist)


def canonical_form(G: StableGraph):
    """Return (C, hmap): the canonical graph and a half-edge map G -> C."""
    code, orders = _search(G)
    C = _graph_from_code(code)
    order = orders[0]
    pos = {v: i for i, v in enumerate(order)}
    vo = G.vertex_of()
    hmap = {h: i for i, h in enumerate(G.legs)}
    slots = {}
    for t, (p, q) in enumerate(code[2]):
        slots.setdefault((p, q), []).append(t)
    n = G.n
    for a, b in G.edges:
        pa, pb = pos[vo[a]], pos[vo[b]]
        if pa > pb:
            a, b, pa, pb = b, a, pb, pa
        t = slots[(pa, pb)].pop(0)
        hmap[a] = n + 2 * t
        hmap[b] = n + 2 * t + 1
    return C, hmap


def canonicalize(G: StableGraph) -> StableGraph:
    return canonical_form(G)[0]


def encoding(G: StableGraph) -> tuple:
    return _search(G)[0]


def is_canonical(G: StableGraph) -> bool:
    return canonicalize(G) == G


@lru_cache(maxsize=None)
def automorphisms(G: StableGraph) -> tuple:
    """All leg-fixing automorphisms of a canonical graph, as half-edge maps.

    Each automorphism is a tuple p with p[h] the image of half-edge h.
    """
    if not is_canonical(G):
        raise ValueError("automorphisms() expects a canonical graph")
    code, orders = _search(G)
    H = len(G.half_edges())
    vo = G.vertex_of()
    base = orders[0]
    groups = {}
    for t, (a, b) in enumerate(G.edges):
        groups.setdefault((vo[a], vo[b]), []).append(t)
    result = set()
    for order in orders:
        vmap = {base[i]: order[i] for i in range(G.nv)}
        # edges between (x, y) go to edges between (vmap x, vmap y)
        choices = []
        for (x, y), ts in groups.items():
            X, Y = vmap[x], vmap[y]
            key = (min(X, Y), max(X, Y))
            targets = groups[key]
            flip = X > Y
            options = []
            for perm in itertools.permutations(targets):
                if x == y:
                    for bits in itertools.product((0, 1), repeat=len(ts)):
                        options.append([(ts[i], perm[i], bits[i]) for i in range(len(ts))])
                else:
                    options.append([(ts[i], perm[i], int(flip)) for i in range(len(ts))])
            choices.append(options)
        for combo in itertools.product(*choices):
            p = list(range(H))
            for block in combo:
                for s, t, f in block:
                    a, b = G.edges[s]
                    c, d = G.edges[t]
                    if f:
                        c, d = d, c
                    p[a], p[b] = c, d
            result.add(tuple(p))
    return tuple(sorted(result))


def automorphism_order(G: StableGraph) -> int:
    """|Aut(G)| from the canonical search and edge multiplicities."""
    code, orders = _search(G)
    mult = {}
    for e in code[2]:
        mult[e] = mult.get(e, 0) + 1
    k = len(orders)
    for (p, q), m in mult.items():
        k *= factorial(m)
        if p == q:
            k *= 2 ** m
    return k


# ---------------------------------------------------------------- contraction

@dataclass(frozen=True)
class Contraction:
    source: StableGraph
    contracted: frozenset      # edge indices of source
    target: StableGraph        # same half-edge ids as source (uncanonicalised)
    vmap: tuple                # source vertex -> target vertex


def contract_edges(G: StableGraph, E) -> Contraction:
    """Contract the edges with indices in E.

    The target keeps the surviving half-edge ids; its vertices are ordered by
    the smallest source vertex they contain.
    """
    E = frozenset(E)
    parent = list(range(G.nv))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    loops = [0] * G.nv
    vo = G.vertex_of()
    for e in sorted(E):
        a, b = G.edges[e]
        x, y = find(vo[a]), find(vo[b])
        if x == y:
            loops[x] += 1
        else:
            lo, hi = min(x, y), max(x, y)
            parent[hi] = lo
            loops[lo] += loops[hi]
    roots = sorted({find(v) for v in range(G.nv)})
    index = {r: i for i, r in enumerate(roots)}
    genus = [0] * len(roots)
    for v in range(G.nv):
        genus[index[find(v)]] += G.genus[v]
    for r in roots:
        genus[index[r]] += loops[r]
    gone = {h for e in E for h in G.edges[e]}
    vhalf = [[] for _ in roots]
    for v in range(G.nv):
        vhalf[index[find(v)]].extend(h for h in G.vhalf[v] if h not in gone)
    edges = [G.edges[e] for e in range(len(G.edges)) if e not in E]
    T = make_graph(genus, vhalf, G.legs, edges)
    return Contraction(G, E, T, tuple(index[find(v)] for v in range(G.nv)))


def edge_index(G: StableGraph, pair) -> int:
    return G.edges.index(tuple(sorted(pair)))


# ---------------------------------------------------------------- enumeration

def _splits(G: StableGraph):
    """All graphs with one more edge that contract onto G."""
    fresh = max(G.half_edges(), default=-1) + 1
    a, b = fresh, fresh + 1
    for v in range(G.nv):
        gv, hs = G.genus[v], G.vhalf[v]
        if gv >= 1:
            vh = [list(x) for x in G.vhalf]
            vh[v] = list(hs) + [a, b]
            gen = list(G.genus)
            gen[v] -= 1
            yield make_graph(gen, vh, G.legs, list(G.edges) + [(a, b)])
        for g1 in range(gv + 1):
            g2 = gv - g1
            for mask in range(2 ** len(hs)):
                left = [h for i, h in enumerate(hs) if mask >> i & 1]
                right = [h for i, h in enumerate(hs) if not mask >> i & 1]
                if 2 * g1 - 2 + len(left) + 1 <= 0 or 2 * g2 - 2 + len(right) + 1 <= 0:
                    continue
                vh = [list(x) for x in G.vhalf]
                vh[v] = left + [a]
                vh.append(right + [b])
                gen = list(G.genus)
                gen[v] = g1
                gen.append(g2)
                yield make_graph(gen, vh, G.legs, list(G.edges) + [(a, b)])


@lru_cache(maxsize=None)
def enumerate_stable_graphs(g: int, n: int) -> tuple:
    """Canonical representatives of Gamma((g, n)), sorted by (edges, encoding)."""
    if not is_stable_type(g, n):
        raise UnstableError(f"(g, n) = ({g}, {n}) is not stable")
    layer = {encoding(star(g, n)): canonicalize(star(g, n))}
    found = dict(layer)
    for _ in range(3 * g - 3 + n):
        nxt = {}
        for G in layer.values():
            for S in _splits(G):
                C = canonicalize(S)
                code = encoding(C)
                if code not in found and code not in nxt:
                    nxt[code] = C
        found.update(nxt)
        layer = nxt
    return tuple(sorted(found.values(), key=lambda G: (len(G.edges), encoding(G))))


def graph_index(G: StableGraph) -> int:
    """Position of a canonical graph in enumerate_stable_graphs(g, n)."""
    return _index_table(G.g, G.n)[G]


@lru_cache(maxsize=None)
def _index_table(g: int, n: int) -> dict:
    return {G: i for i, G in enumerate(enumerate_stable_graphs(g, n))}


# ---------------------------------------------------------------- chains

@dataclass(frozen=True)
class ContractionChain:
    base: StableGraph          # G_0, canonical
    steps: tuple               # J_1 < ... < J_k as sorted tuples of edge indices

    @property
    def k(self) -> int:
        return len(self.steps)

    def graphs(self) -> list:
        return [self.base] + [contract_edges(self.base, J).target for J in self.steps]


def _edge_perm(G: StableGraph, p) -> list:
    return [edge_index(G, (p[a], p[b])) for a, b in G.edges]


def canonical_chain(base: StableGraph, steps) -> ContractionChain:
    best = None
    for p in automorphisms(base):
        ep = _edge_perm(base, p)
        img = tuple(tuple(sorted(ep[e] for e in J)) for J in steps)
        if best is None or img < best:
            best = img
    return ContractionChain(base, best)


def enumerate_contraction_chains(g: int, n: int, k: int) -> tuple:
    """Strict chains G_0 -> ... -> G_k in Gamma((g, n)) up to isomorphism."""
    if k < 0:
        raise ValueError("chain length must be nonnegative")
    out = []
    for G in enumerate_stable_graphs(g, n):
        E = range(len(G.edges))
        found = set()
        for steps in _flags(tuple(E), k):
            found.add(canonical_chain(G, steps))
        out.extend(sorted(found, key=lambda c: c.steps))
    return tuple(out)


def _flags(E: tuple, k: int):
    if k == 0:
        yield ()
        return
    subsets = [frozenset(c) for r in range(1, len(E) + 1) for c in itertools.combinations(E, r)]

    def rec(prev, depth):
        if depth == k:
            yield ()
            return
        for S in subsets:
            if prev < S:
                for rest in rec(S, depth + 1):
                    yield (tuple(sorted(S)),) + rest

    yield from rec(frozenset(), 0)


# ---------------------------------------------------------------- text format

def to_text(G: StableGraph) -> str:
    lines = [f"graph g={G.g} n={G.n}"]
    for v in range(G.nv):
        lines.append("v " + " ".join(str(x) for x in (G.genus[v],) + G.vhalf[v]))
    for i, h in enumerate(G.legs):
        lines.append(f"l {i + 1} {h}")
    for a, b in G.edges:
        lines.append(f"e {a} {b}")
    return "\n".join(lines) + "\n"


def from_text(text: str) -> StableGraph:
    genus, vhalf, legs, edges = [], [], {}, []
    header = None
    for raw in text.splitlines():
        parts = raw.split()
        if not parts:
            continue
        tag = parts[0]
        if tag == "graph":
            header = dict(p.split("=") for p in parts[1:])
        elif tag == "v":
            genus.append(int(parts[1]))
            vhalf.append([int(x) for x in parts[2:]])
        elif tag == "l":
            legs[int(parts[1])] = int(parts[2])
        elif tag == "e":
            edges.append((int(parts[1]), int(parts[2])))
        else:
            raise ValueError(f"unknown record {tag!r}")
    if header is None:
        raise ValueError("missing graph header")
    G = make_graph(genus, vhalf, [legs[i] for i in range(1, len(legs) + 1)], edges)
    if G.g != int(header["g"]) or G.n != int(header["n"]):
        raise ValueError("header does not match graph")
    return G


def dimension_sum(G: StableGraph) -> int:
    return sum(3 * gv - 3 + len(hs) for gv, hs in zip(G.genus, G.vhalf)) + len(G.edges)
