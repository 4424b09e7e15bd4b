"""Finite S^1-framed modular operads given by explicit tables.

Each P(g, n) is a graded space with basis 0..dim-1.  Linear maps are stored as
sparse columns: ``cols[a]`` is a tuple of (row, coefficient) pairs.  Slots are
0-based in memory and 1-based in the text file.

Operations on P(G) = tensor over the vertices of G are provided here as well,
with the Koszul rule applied to the (homological) degrees of the factors.
"""
from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources

from . import kernels
from . import stable_graphs as sg
from .linalg import add_term


class IncompleteFixture(KeyError):
    pass


class FixtureFormatError(ValueError):
    pass


def _num(text: str):
    q = Fraction(text)
    return q.numerator if q.denominator == 1 else q


def _fmt(c) -> str:
    if isinstance(c, Fraction) and c.denominator != 1:
        return f"{c.numerator}/{c.denominator}"
    return str(int(c))


@dataclass
class OperadFixture:
    name: str
    degrees: dict = field(default_factory=dict)     # (g, n) -> tuple of degrees
    d: dict = field(default_factory=dict)           # (g, n) -> cols
    B: dict = field(default_factory=dict)           # (g, n, i) -> cols
    swap: dict = field(default_factory=dict)        # (g, n, i) -> cols, swaps slots i, i+1
    loop: dict = field(default_factory=dict)        # (g, n, i, j), i < j -> cols into (g+1, n-2)
    pair: dict = field(default_factory=dict)        # (g, n, i, g2, n2, j) -> {(a, b): ((row, c), ...)}
    # optional grading kept by d and compositions and raised by B; it bounds FP sectors
    weights: dict = field(default_factory=dict)     # (g, n) -> tuple of weights

    def weight(self, g: int, n: int, a: int) -> int:
        return self.weights[(g, n)][a]

    # ------------------------------------------------------------ basic access

    def types(self) -> list:
        return sorted(self.degrees)

    def has(self, g: int, n: int) -> bool:
        return (g, n) in self.degrees

    def dim(self, g: int, n: int) -> int:
        try:
            return len(self.degrees[(g, n)])
        except KeyError:
            raise IncompleteFixture(f"no space P({g},{n})") from None

    def deg(self, g: int, n: int, a: int) -> int:
        return self.degrees[(g, n)][a]

    def _get(self, table: dict, key, what: str):
        try:
            return table[key]
        except KeyError:
            raise IncompleteFixture(f"missing {what} {key}") from None

    def apply(self, cols, vec: dict) -> dict:
        out = {}
        for a, c in vec.items():
            for r, x in cols[a]:
                add_term(out, r, x * c)
        return out

    def apply_d(self, g, n, vec):
        return self.apply(self._get(self.d, (g, n), "d"), vec)

    def apply_B(self, g, n, i, vec):
        return self.apply(self._get(self.B, (g, n, i), "B"), vec)

    def apply_loop(self, g, n, i, j, vec):
        return self.apply(self._get(self.loop, (g, n, i, j), "loop composition"), vec)

    def apply_pair(self, g, n, i, g2, n2, j, vx: dict, vy: dict) -> dict:
        table = self._get(self.pair, (g, n, i, g2, n2, j), "pair composition")
        out = {}
        for a, ca in vx.items():
            for b, cb in vy.items():
                for r, x in table.get((a, b), ()):
                    add_term(out, r, x * ca * cb)
        return out

    def perm_cols(self, g: int, n: int, perm: tuple):
        """Sparse columns of the S_n action; perm[i] is the new slot of slot i."""
        return _perm_cols(self, g, n, tuple(perm))

    def apply_perm(self, g, n, perm, vec):
        perm = tuple(perm)
        if perm == tuple(range(n)):
            return dict(vec)
        return self.apply(self.perm_cols(g, n, perm), vec)

    def is_monomial(self) -> bool:
        for key, cols in self.swap.items():
            for col in cols:
                if len(col) != 1 or abs(col[0][1]) != 1:
                    return False
        return True

    def __hash__(self):
        return id(self)

    # ------------------------------------------------------------ file format

    def to_text(self) -> str:
        out = [f"fixture {self.name}"]
        for (g, n) in self.types():
            degs = self.degrees[(g, n)]
            out.append(f"space {g} {n} {len(degs)}")
            out.append(f"degrees {g} {n} " + " ".join(map(str, degs)))
            if (g, n) in self.weights:
                out.append(f"weights {g} {n} " + " ".join(map(str, self.weights[(g, n)])))
        for (g, n), cols in sorted(self.d.items()):
            out.extend(_map_lines(f"d {g} {n}", cols))
        for (g, n, i), cols in sorted(self.B.items()):
            out.extend(_map_lines(f"B {g} {n} {i + 1}", cols))
        for (g, n, i), cols in sorted(self.swap.items()):
            out.extend(_map_lines(f"swap {g} {n} {i + 1}", cols))
        for (g, n, i, j), cols in sorted(self.loop.items()):
            out.extend(_map_lines(f"loop {g} {n} {i + 1} {j + 1}", cols))
        for (g, n, i, g2, n2, j), table in sorted(self.pair.items()):
            head = f"pair {g} {n} {i + 1} {g2} {n2} {j + 1}"
            for (a, b) in sorted(table):
                for r, c in table[(a, b)]:
                    out.append(f"{head} {a} {b} {r} {_fmt(c)}")
        return "\n".join(out) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()[:16]

    @classmethod
    def from_text(cls, text: str) -> "OperadFixture":
        F = cls(name="")
        raw_maps = {}
        dims = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            tag = parts[0]
            try:
                if tag == "fixture":
                    F.name = parts[1]
                elif tag == "space":
                    dims[(int(parts[1]), int(parts[2]))] = int(parts[3])
                elif tag == "degrees":
                    F.degrees[(int(parts[1]), int(parts[2]))] = tuple(int(x) for x in parts[3:])
                elif tag == "weights":
                    F.weights[(int(parts[1]), int(parts[2]))] = tuple(int(x) for x in parts[3:])
                elif tag in ("d", "B", "swap", "loop"):
                    width = {"d": 2, "B": 3, "swap": 3, "loop": 4}[tag]
                    key = tuple(int(x) for x in parts[1:1 + width])
                    col, row, c = int(parts[1 + width]), int(parts[2 + width]), _num(parts[3 + width])
                    raw_maps.setdefault((tag, key), {}).setdefault(col, []).append((row, c))
                elif tag == "pair":
                    key = tuple(int(x) for x in parts[1:7])
                    a, b, r, c = int(parts[7]), int(parts[8]), int(parts[9]), _num(parts[10])
                    g, n, i, g2, n2, j = key
                    table = F.pair.setdefault((g, n, i - 1, g2, n2, j - 1), {})
                    table.setdefault((a, b), []).append((r, c))
                else:
                    raise FixtureFormatError(f"unknown record {tag!r}")
            except (IndexError, ValueError) as exc:
                raise FixtureFormatError(f"line {lineno}: {exc}") from None
        for key, n in dims.items():
            if len(F.degrees.get(key, ())) != n:
                raise FixtureFormatError(f"degree list of P{key} has wrong length")
        for (tag, key), cols in raw_maps.items():
            g, n = key[0], key[1]
            if (g, n) not in F.degrees:
                raise FixtureFormatError(f"{tag} refers to missing space P({g},{n})")
            dense = [tuple(sorted(cols.get(a, ()))) for a in range(len(F.degrees[(g, n)]))]
            if tag == "d":
                F.d[(g, n)] = dense
            elif tag == "B":
                F.B[(g, n, key[2] - 1)] = dense
            elif tag == "swap":
                F.swap[(g, n, key[2] - 1)] = dense
            else:
                F.loop[(g, n, key[2] - 1, key[3] - 1)] = dense
        for key, table in F.pair.items():
            for ab in list(table):
                table[ab] = tuple(sorted(table[ab]))
        # maps that are identically zero have no lines; fill them in
        for (g, n) in F.degrees:
            dim = len(F.degrees[(g, n)])
            F.d.setdefault((g, n), [()] * dim)
            for i in range(n):
                F.B.setdefault((g, n, i), [()] * dim)
            for i in range(n - 1):
                F.swap.setdefault((g, n, i), [()] * dim)
        return F


def _map_lines(head: str, cols) -> list:
    return [f"{head} {a} {r} {_fmt(c)}" for a, col in enumerate(cols) for r, c in col]


@lru_cache(maxsize=None)
def _perm_cols(F: OperadFixture, g: int, n: int, perm: tuple):
    # decompose into adjacent transpositions by bubble sort on target positions
    dim = F.dim(g, n)
    cur = list(perm)             # cur[slot] = destination
    swaps = []
    changed = True
    while changed:
        changed = False
        for i in range(n - 1):
            if cur[i] > cur[i + 1]:
                cur[i], cur[i + 1] = cur[i + 1], cur[i]
                swaps.append(i)
                changed = True
    # sorting gives p s_1 ... s_m = id, so p = s_m ... s_1: apply s_1 first
    cols = []
    for a in range(dim):
        vec = {a: 1}
        for i in swaps:
            vec = F.apply(F._get(F.swap, (g, n, i), "swap"), vec)
        cols.append(tuple(sorted(vec.items())))
    return cols


def load_fixture(path) -> OperadFixture:
    with open(path) as fh:
        return OperadFixture.from_text(fh.read())


# ================================================================ builders

def _normal_word(word: list):
    """Sort a word in odd generators; 'T' sorts first.  Returns (sign, tuple) or None."""
    keyed = [(-1 if w == "T" else w) for w in word]
    if len(set(keyed)) != len(keyed):
        return None
    inv = sum(1 for p in range(len(keyed)) for q in range(p + 1, len(keyed)) if keyed[p] > keyed[q])
    return (-1) ** inv, tuple(sorted(keyed))


def _torus_index(n: int, word: tuple) -> int:
    idx = 0
    for w in word:
        if w == -1:
            idx += 1 << n
        else:
            idx |= 1 << w
    return idx


def _torus_word(n: int, idx: int) -> list:
    return _framed_word(n, idx)


def _framed_word(n: int, idx: int) -> list:
    """Letters of basis element idx: 'T' (tau), 'E' (eta) or theta slots."""
    head = (idx >> n) & 3
    word = ["T"] if head == 1 else ["E"] if head == 2 else []
    return word + [k for k in range(n) if idx >> k & 1]


def _framed_image(word: list, coeff):
    """Normal form of a product of letters as (coeff, eta?, sorted odd word), or None."""
    e = word.count("E")
    if e > 1:
        return None
    nw = _normal_word([w for w in word if w != "E"])
    if nw is None:
        return None
    sign, w = nw
    if w.count(-1) > 1 or (e and -1 in w):
        return None
    return sign * coeff, bool(e), w


def _framed_index(n: int, eta: bool, word: tuple) -> int:
    return _torus_index(n, word) + ((2 << n) if eta else 0)


def build_torus(types, signs=(1, 1, 1, 1), name: str = "torus") -> OperadFixture:
    """Homology of framing tori with one twist circle.

    P(g, n) is the exterior algebra on degree-1 generators theta_1..theta_n and
    tau, so dim P(g, n) = 2^(n+1).  Basis index a*2^n + mask stands for
    tau^a theta_mask.  B_i is left multiplication by theta_i.  Compositions are
    the algebra maps induced by adding angles: the two sewn thetas go to tau
    and the two taus merge.  ``signs`` = (s1, s2, s3, s4) weight the images of
    theta_j on the right factor, theta_i on the left factor, and theta_i,
    theta_j for a loop.
    """
    return _build_framed(types, signs, name, False)


def build_disk(types, signs=(1, 1, 1, 1), name: str = "disk") -> OperadFixture:
    """The torus model with the twist circle filled in.

    An even generator eta of degree 2 with d(eta) = tau is added, subject to
    eta^2 = tau*eta = 0, so dim P(g, n) = 3 * 2^n and basis index 2*2^n + mask
    stands for eta theta_mask.  Homology is the exterior algebra on the thetas;
    twisted sewing becomes exact.  Compositions send eta to eta.
    """
    return _build_framed(types, signs, name, True)


def _build_framed(types, signs, name: str, disk: bool) -> OperadFixture:
    s1, s2, s3, s4 = signs
    types = sorted(set(types))
    tset = set(types)
    F = OperadFixture(name=name)
    heads = 3 if disk else 2

    def index(n, img):
        return _framed_index(n, img[1], img[2])

    for g, n in types:
        dim = heads << n
        words = [_framed_word(n, a) for a in range(dim)]
        F.degrees[(g, n)] = tuple(len(w) + w.count("E") for w in words)
        F.weights[(g, n)] = tuple(len(w) for w in words)
        dcols = []
        for w in words:
            img = _framed_image(["T"] + w[1:], 1) if w[:1] == ["E"] else None
            dcols.append(() if img is None else ((index(n, img), img[0]),))
        F.d[(g, n)] = dcols
        for i in range(n):
            cols = []
            for w in words:
                img = _framed_image([i] + w, 1)
                cols.append(() if img is None else ((index(n, img), img[0]),))
            F.B[(g, n, i)] = cols
        for i in range(n - 1):
            cols = []
            for w in words:
                img = _framed_image([i + 1 if k == i else i if k == i + 1 else k for k in w], 1)
                cols.append(((index(n, img), img[0]),))
            F.swap[(g, n, i)] = cols
        if (g + 1, n - 2) in tset:
            for i, j in itertools.combinations(range(n), 2):
                cols = []
                for w0 in words:
                    coeff, w = 1, []
                    for k in w0:
                        if k == i:
                            coeff *= s3
                            w.append("T")
                        elif k == j:
                            coeff *= s4
                            w.append("T")
                        else:
                            w.append(k if isinstance(k, str) else k - (k > i) - (k > j))
                    img = _framed_image(w, coeff)
                    cols.append(() if img is None else ((index(n - 2, img), img[0]),))
                F.loop[(g, n, i, j)] = cols
    for (g, n), (g2, n2) in itertools.product(types, repeat=2):
        nt = n + n2 - 2
        if (g + g2, nt) not in tset or n == 0 or n2 == 0:
            continue
        wa = [_framed_word(n, a) for a in range(heads << n)]
        wb = [_framed_word(n2, b) for b in range(heads << n2)]
        for i in range(n):
            for j in range(n2):
                table = {}
                for a, x in enumerate(wa):
                    for b, y in enumerate(wb):
                        coeff, w = 1, []
                        for k in x:
                            if k == i:
                                coeff *= s2
                                w.append("T")
                            else:
                                w.append(k if isinstance(k, str) else k - (k > i))
                        for k in y:
                            if k == j:
                                coeff *= s1
                                w.append("T")
                            else:
                                w.append(k if isinstance(k, str) else n - 1 + k - (k > j))
                        img = _framed_image(w, coeff)
                        if img is not None:
                            table[(a, b)] = ((index(nt, img), img[0]),)
                F.pair[(g, n, i, g2, n2, j)] = table
    return F


def build_trivial(types, name: str = "trivial") -> OperadFixture:
    """Each P(g, n) is Q in degree 0 with B = 0 and identity compositions."""
    types = sorted(set(types))
    tset = set(types)
    F = OperadFixture(name=name)
    for g, n in types:
        F.degrees[(g, n)] = (0,)
        F.weights[(g, n)] = (0,)
        F.d[(g, n)] = [()]
        for i in range(n):
            F.B[(g, n, i)] = [()]
        for i in range(n - 1):
            F.swap[(g, n, i)] = [((0, 1),)]
        if (g + 1, n - 2) in tset:
            for i, j in itertools.combinations(range(n), 2):
                F.loop[(g, n, i, j)] = [((0, 1),)]
    for (g, n), (g2, n2) in itertools.product(types, repeat=2):
        if (g + g2, n + n2 - 2) in tset and n and n2:
            for i in range(n):
                for j in range(n2):
                    F.pair[(g, n, i, g2, n2, j)] = {(0, 0): ((0, 1),)}
    return F


def default_types() -> list:
    """Types covered by the packaged fixtures: 2g-2+n <= 4 plus the g<=2, n<=4 box."""
    out = set()
    for g in range(4):
        for n in range(7):
            if sg.is_stable_type(g, n) and (2 * g - 2 + n <= 4 or (g <= 2 and n <= 4)):
                out.add((g, n))
    return sorted(out)


def negate_entry(F: OperadFixture, key, ab) -> OperadFixture:
    """Copy of F with a single pair-composition entry negated (a deliberate defect)."""
    G = OperadFixture.from_text(F.to_text())
    G.name = F.name + "-defect"
    table = G.pair[key]
    table[ab] = tuple((r, -c) for r, c in table[ab])
    return G


# frozen output of search_torus_signs()
TORUS_SIGNS = (1, 1, 1, 1)
TORUS_FILE = "torus.fixture"


@lru_cache(maxsize=None)
def torus_fixture() -> OperadFixture:
    text = resources.files("cei_ground.data").joinpath(TORUS_FILE).read_text()
    return OperadFixture.from_text(text)


def torus_fixture_text(signs=TORUS_SIGNS) -> str:
    F = build_torus(default_types(), signs)
    head = "# torus fixture, signs " + " ".join(map(str, signs)) + "\n"
    return head + F.to_text()


@lru_cache(maxsize=None)
def disk_fixture() -> OperadFixture:
    return build_disk(default_types(), TORUS_SIGNS)


@lru_cache(maxsize=None)
def trivial_fixture() -> OperadFixture:
    return build_trivial(default_types())


# ================================================================ P(G) level

koszul_sort_sign = kernels.koszul_sort_sign


def vertex_types(G: sg.StableGraph) -> list:
    return [(G.genus[v], len(G.vhalf[v])) for v in range(G.nv)]


def pg_degree(F: OperadFixture, G: sg.StableGraph, key: tuple) -> int:
    return sum(F.deg(g, n, a) for (g, n), a in zip(vertex_types(G), key))


def pg_B(F: OperadFixture, G: sg.StableGraph, h: int, elem: dict) -> dict:
    """Circle operator at half-edge h acting on P(G) (Koszul signs)."""
    vo = G.vertex_of()
    v = vo[h]
    slot = G.vhalf[v].index(h)
    g, n = G.genus[v], len(G.vhalf[v])
    cols = F.B[(g, n, slot)]
    types = vertex_types(G)
    out = {}
    for key, c in elem.items():
        pre = sum(F.deg(*types[w], key[w]) for w in range(v)) & 1
        s = -c if pre else c
        for r, x in cols[key[v]]:
            add_term(out, key[:v] + (r,) + key[v + 1:], x * s)
    return out


def pg_d(F: OperadFixture, G: sg.StableGraph, elem: dict) -> dict:
    types = vertex_types(G)
    out = {}
    for key, c in elem.items():
        pre = 0
        for v, (g, n) in enumerate(types):
            s = -c if pre & 1 else c
            for r, x in F.d[(g, n)][key[v]]:
                add_term(out, key[:v] + (r,) + key[v + 1:], x * s)
            pre += F.deg(g, n, key[v])
    return out


def _sort_perm(labels: list) -> tuple:
    """perm[i] = position of labels[i] after sorting."""
    ranked = sorted(range(len(labels)), key=lambda i: labels[i])
    perm = [0] * len(labels)
    for pos, i in enumerate(ranked):
        perm[i] = pos
    return tuple(perm)


@lru_cache(maxsize=None)
def _contract_plan(F: OperadFixture, G: sg.StableGraph, e: int):
    con = sg.contract_edges(G, [e])
    T = con.target
    h1, h2 = G.edges[e]
    vo = G.vertex_of()
    a, b = vo[h1], vo[h2]
    types = vertex_types(G)
    i, j = G.vhalf[a].index(h1), G.vhalf[b].index(h2)
    par = [tuple(d & 1 for d in F.degrees[t]) for t in types]
    if a == b:
        g, n = types[a]
        return con, a, b, F._get(F.loop, (g, n, i, j), "loop composition"), None, par
    (ga, na), (gb, nb) = types[a], types[b]
    table = F._get(F.pair, (ga, na, i, gb, nb, j), "pair composition")
    # the table lists slots of a then b; the merged vertex lists them by half-edge id
    labels = [h for h in G.vhalf[a] if h != h1] + [h for h in G.vhalf[b] if h != h2]
    w = con.vmap[a]
    perm = F.perm_cols(T.genus[w], len(T.vhalf[w]), _sort_perm(labels))
    merged = {}
    for ab, col in table.items():
        res = {}
        for r, x in col:
            for r2, y in perm[r]:
                add_term(res, r2, x * y)
        if res:
            merged[ab] = tuple(res.items())
    return con, a, b, merged, True, par


def pg_contract(F: OperadFixture, G: sg.StableGraph, e: int, elem: dict):
    """Apply the composition P(G) -> P(G/e).  Returns (Contraction, element)."""
    con, a, b, table, pair, par = _contract_plan(F, G, e)
    out = {}
    if not pair:
        for key, c in elem.items():
            for r, x in table[key[a]]:
                add_term(out, key[:a] + (r,) + key[a + 1:], x * c)
        return con, out
    lo, hi = min(a, b), max(a, b)
    for key, c in elem.items():
        col = table.get((key[a], key[b]))
        if not col:
            continue
        # bring the factor at a next to the one at b, in the order (a, b)
        mid = sum(par[v][key[v]] for v in range(lo + 1, hi))
        if b > a:
            odd = par[b][key[b]] * mid
        else:
            odd = par[a][key[a]] * (mid + par[b][key[b]])
        sign = -c if odd & 1 else c
        rest = key[:lo] + key[lo + 1:hi] + key[hi + 1:]
        for r, x in col:
            add_term(out, rest[:lo] + (r,) + rest[lo:], x * sign)
    return con, out


def pg_transport(F: OperadFixture, G: sg.StableGraph, T: sg.StableGraph, hmap: dict, elem: dict) -> dict:
    """Transport an element of P(G) along an isomorphism G -> T given on half-edges."""
    voT = T.vertex_of()
    vmap = []
    for v in range(G.nv):
        if G.vhalf[v]:
            vmap.append(voT[hmap[G.vhalf[v][0]]])
        else:
            vmap.append(v)
    types = vertex_types(G)
    perms = []
    for v in range(G.nv):
        w = vmap[v]
        target = T.vhalf[w]
        perms.append(tuple(target.index(hmap[h]) for h in G.vhalf[v]))
    out = {}
    for key, c in elem.items():
        parts = [F.apply_perm(*types[v], perms[v], {key[v]: 1}) for v in range(G.nv)]
        for combo in itertools.product(*(p.items() for p in parts)):
            coef = c
            newkey = [None] * G.nv
            par = []
            for v, (r, x) in enumerate(combo):
                coef *= x
                newkey[vmap[v]] = r
                par.append(F.deg(*types[v], r) & 1)
            coef *= koszul_sort_sign(par, vmap)
            add_term(out, tuple(newkey), coef)
    return out


def pg_basis(F: OperadFixture, G: sg.StableGraph):
    dims = [range(F.dim(g, n)) for g, n in vertex_types(G)]
    return itertools.product(*dims)


# ================================================================ validation

@dataclass
class AxiomResult:
    name: str
    checked: int = 0
    witness: str | None = None

    @property
    def ok(self) -> bool:
        return self.witness is None

    def fail(self, text: str) -> None:
        if self.witness is None:
            self.witness = text


@dataclass
class AxiomReport:
    fixture: str
    cutoff: tuple
    results: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results.values())

    def failures(self) -> list:
        return [name for name, r in self.results.items() if not r.ok]

    def lines(self) -> list:
        out = []
        for name, r in self.results.items():
            status = "pass" if r.ok else "FAIL"
            extra = "" if r.ok else f"  witness: {r.witness}"
            out.append(f"{status} {name} ({r.checked} checks){extra}")
        return out

    def _get(self, name: str) -> AxiomResult:
        if name not in self.results:
            self.results[name] = AxiomResult(name)
        return self.results[name]


AXIOMS = ("d_square", "d_degree", "B_degree", "B_square", "B_anticommute", "dB_anticommute",
          "symmetric_group", "B_equivariance", "composition_degree", "composition_chain_map",
          "circle_equivariance", "equivariance", "loop_symmetry", "swap_symmetry",
          "rotation_invariance", "graph_rotation_invariance", "naturality", "order_independence")
# "weight_grading" is added when the fixture declares weights


def _induced(perm: tuple, drop: tuple) -> tuple:
    """Permutation of the surviving slots after removing the slots in drop."""
    keep = [k for k in range(len(perm)) if k not in drop]
    new_keep = sorted(perm[k] for k in keep)
    rank = {p: r for r, p in enumerate(new_keep)}
    return tuple(rank[perm[k]] for k in keep)


def _transpositions(n: int):
    for a, b in itertools.combinations(range(n), 2):
        p = list(range(n))
        p[a], p[b] = b, a
        yield tuple(p)


def _unit(a) -> dict:
    return {a: 1}


def _neg(vec: dict) -> dict:
    return {k: -c for k, c in vec.items()}


def _sum(*vecs) -> dict:
    out = {}
    for v in vecs:
        for k, c in v.items():
            add_term(out, k, c)
    return out


def _check_degrees(F, R, key, vec, want, label):
    g, n = key
    for r in vec:
        if F.deg(g, n, r) != want:
            R.fail(f"{label}: output basis {r} of P{key} has degree {F.deg(g, n, r)}, expected {want}")


def _validate_spaces(F, rep, types):
    for (g, n) in types:
        dim = F.dim(g, n)
        deg = F.degrees[(g, n)]
        for a in range(dim):
            x = _unit(a)
            dx = F.apply_d(g, n, x)
            R = rep._get("d_degree")
            R.checked += 1
            _check_degrees(F, R, (g, n), dx, deg[a] - 1, f"d(e{a})")
            R = rep._get("d_square")
            R.checked += 1
            if F.apply_d(g, n, dx):
                R.fail(f"d^2(e{a}) != 0 in P({g},{n})")
            Bx = [F.apply_B(g, n, i, x) for i in range(n)]
            for i in range(n):
                R = rep._get("B_degree")
                R.checked += 1
                _check_degrees(F, R, (g, n), Bx[i], deg[a] + 1, f"B{i + 1}(e{a})")
                R = rep._get("B_square")
                R.checked += 1
                if F.apply_B(g, n, i, Bx[i]):
                    R.fail(f"B{i + 1}^2(e{a}) != 0 in P({g},{n})")
                R = rep._get("dB_anticommute")
                R.checked += 1
                if _sum(F.apply_d(g, n, Bx[i]), F.apply_B(g, n, i, dx)):
                    R.fail(f"(dB{i + 1}+B{i + 1}d)(e{a}) != 0 in P({g},{n})")
                for j in range(i + 1, n):
                    R = rep._get("B_anticommute")
                    R.checked += 1
                    if _sum(F.apply_B(g, n, j, Bx[i]), F.apply_B(g, n, i, Bx[j])):
                        R.fail(f"(B{i + 1}B{j + 1}+B{j + 1}B{i + 1})(e{a}) != 0 in P({g},{n})")
            # symmetric group: relations, degrees, compatibility with d and B
            R = rep._get("symmetric_group")
            for i in range(n - 1):
                R.checked += 1
                s = F.apply(F.swap[(g, n, i)], x)
                if F.apply(F.swap[(g, n, i)], s) != x:
                    R.fail(f"s{i + 1}^2 != id on e{a} in P({g},{n})")
                _check_degrees(F, R, (g, n), s, deg[a], f"s{i + 1}(e{a})")
                if F.apply(F.swap[(g, n, i)], dx) != F.apply_d(g, n, s):
                    R.fail(f"s{i + 1} does not commute with d on e{a} in P({g},{n})")
                if i + 2 < n:
                    v = x
                    for _ in range(3):
                        v = F.apply(F.swap[(g, n, i + 1)], F.apply(F.swap[(g, n, i)], v))
                    if v != x:
                        R.fail(f"(s{i + 1}s{i + 2})^3 != id on e{a} in P({g},{n})")
                for j in range(i + 2, n - 1):
                    v = F.apply(F.swap[(g, n, j)], F.apply(F.swap[(g, n, i)], x))
                    w = F.apply(F.swap[(g, n, i)], F.apply(F.swap[(g, n, j)], x))
                    if v != w:
                        R.fail(f"s{i + 1}, s{j + 1} do not commute on e{a} in P({g},{n})")
                R2 = rep._get("B_equivariance")
                for k in range(n):
                    R2.checked += 1
                    k2 = i + 1 if k == i else i if k == i + 1 else k
                    lhs = F.apply(F.swap[(g, n, i)], Bx[k])
                    rhs = F.apply_B(g, n, k2, s)
                    if lhs != rhs:
                        R2.fail(f"s{i + 1} B{k + 1} != B{k2 + 1} s{i + 1} on e{a} in P({g},{n})")


def _validate_loops(F, rep, types):
    tset = set(types)
    for (g, n) in types:
        if (g + 1, n - 2) not in tset:
            continue
        gt, nt = g + 1, n - 2
        dim = F.dim(g, n)
        for i, j in itertools.combinations(range(n), 2):
            for a in range(dim):
                x = _unit(a)
                cx = F.apply_loop(g, n, i, j, x)
                R = rep._get("composition_degree")
                R.checked += 1
                _check_degrees(F, R, (gt, nt), cx, F.deg(g, n, a), f"loop c{i + 1}{j + 1}(e{a}) from P({g},{n})")
                R = rep._get("composition_chain_map")
                R.checked += 1
                if F.apply_d(gt, nt, cx) != F.apply_loop(g, n, i, j, F.apply_d(g, n, x)):
                    R.fail(f"loop c{i + 1}{j + 1} on P({g},{n}) is not a chain map at e{a}")
                R = rep._get("circle_equivariance")
                for k in range(n):
                    if k in (i, j):
                        continue
                    R.checked += 1
                    k2 = k - (k > i) - (k > j)
                    lhs = F.apply_loop(g, n, i, j, F.apply_B(g, n, k, x))
                    rhs = F.apply_B(gt, nt, k2, cx)
                    if lhs != rhs:
                        R.fail(f"loop c{i + 1}{j + 1}(B{k + 1} e{a}) != B{k2 + 1} c(e{a}) on P({g},{n})")
                R = rep._get("rotation_invariance")
                R.checked += 1
                lhs = F.apply_loop(g, n, i, j, F.apply_B(g, n, i, x))
                rhs = F.apply_loop(g, n, i, j, F.apply_B(g, n, j, x))
                if lhs != rhs:
                    R.fail(f"loop c{i + 1}{j + 1}(B{i + 1} e{a}) != c{i + 1}{j + 1}(B{j + 1} e{a}) on P({g},{n})")
                for p in _transpositions(n):
                    px = F.apply_perm(g, n, p, x)
                    i2, j2 = sorted((p[i], p[j]))
                    lhs = F.apply_loop(g, n, i2, j2, px)
                    rhs = F.apply_perm(gt, nt, _induced(p, (i, j)), cx)
                    name = "loop_symmetry" if {i, j} == {p[i], p[j]} else "equivariance"
                    R = rep._get(name)
                    R.checked += 1
                    if lhs != rhs:
                        R.fail(f"loop c{i + 1}{j + 1} on P({g},{n}) fails for transposition {p} at e{a}")


def _validate_pairs(F, rep, types):
    tset = set(types)
    for (g, n), (g2, n2) in itertools.product(types, repeat=2):
        gt, nt = g + g2, n + n2 - 2
        if (gt, nt) not in tset or not n or not n2:
            continue
        block = tuple(list(range(n2 - 1, n2 - 1 + n - 1)) + list(range(n2 - 1)))
        for i in range(n):
            for j in range(n2):
                for a in range(F.dim(g, n)):
                    x = _unit(a)
                    dx = F.apply_d(g, n, x)
                    Bx = [F.apply_B(g, n, k, x) for k in range(n)]
                    da = F.deg(g, n, a)
                    sx = -1 if da & 1 else 1
                    for b in range(F.dim(g2, n2)):
                        y = _unit(b)
                        db = F.deg(g2, n2, b)
                        cxy = F.apply_pair(g, n, i, g2, n2, j, x, y)
                        tag = f"pair c{i + 1}{j + 1} on P({g},{n})xP({g2},{n2}) at (e{a}, e{b})"
                        R = rep._get("composition_degree")
                        R.checked += 1
                        _check_degrees(F, R, (gt, nt), cxy, da + db, tag)
                        R = rep._get("composition_chain_map")
                        R.checked += 1
                        rhs = _sum(F.apply_pair(g, n, i, g2, n2, j, dx, y),
                                   {k: sx * c for k, c in
                                    F.apply_pair(g, n, i, g2, n2, j, x, F.apply_d(g2, n2, y)).items()})
                        if F.apply_d(gt, nt, cxy) != rhs:
                            R.fail(tag + ": not a chain map")
                        R = rep._get("rotation_invariance")
                        R.checked += 1
                        lhs = F.apply_pair(g, n, i, g2, n2, j, Bx[i], y)
                        rhs = F.apply_pair(g, n, i, g2, n2, j, x, F.apply_B(g2, n2, j, y))
                        if lhs != {k: sx * c for k, c in rhs.items()}:
                            R.fail(tag + f": c(B{i + 1}x (x) y) != (-1)^|x| c(x (x) B{j + 1}y)")
                        R = rep._get("circle_equivariance")
                        for k in range(n):
                            if k == i:
                                continue
                            R.checked += 1
                            lhs = F.apply_pair(g, n, i, g2, n2, j, Bx[k], y)
                            if lhs != F.apply_B(gt, nt, k - (k > i), cxy):
                                R.fail(tag + f": B{k + 1} on the left factor")
                        for k in range(n2):
                            if k == j:
                                continue
                            R.checked += 1
                            lhs = F.apply_pair(g, n, i, g2, n2, j, x, F.apply_B(g2, n2, k, y))
                            rhs = F.apply_B(gt, nt, n - 1 + k - (k > j), cxy)
                            if lhs != {r: sx * c for r, c in rhs.items()}:
                                R.fail(tag + f": B{k + 1} on the right factor")
                        R = rep._get("equivariance")
                        for p in _transpositions(n):
                            R.checked += 1
                            lhs = F.apply_pair(g, n, p[i], g2, n2, j, F.apply_perm(g, n, p, x), y)
                            q = _induced(p, (i,)) + tuple(range(n - 1, nt))
                            if lhs != F.apply_perm(gt, nt, q, cxy):
                                R.fail(tag + f": left transposition {p}")
                        for p in _transpositions(n2):
                            R.checked += 1
                            lhs = F.apply_pair(g, n, i, g2, n2, p[j], x, F.apply_perm(g2, n2, p, y))
                            q = tuple(range(n - 1)) + tuple(n - 1 + t for t in _induced(p, (j,)))
                            if lhs != F.apply_perm(gt, nt, q, cxy):
                                R.fail(tag + f": right transposition {p}")
                        R = rep._get("swap_symmetry")
                        R.checked += 1
                        lhs = F.apply_pair(g2, n2, j, g, n, i, y, x)
                        sign = -1 if da * db & 1 else 1
                        rhs = {r: sign * c for r, c in F.apply_perm(gt, nt, block, cxy).items()}
                        if lhs != rhs:
                            R.fail(tag + ": exchanging the two sides")


def _graphs_in_box(F, box, edges: int):
    gmax, nmax = box
    for (g, n) in F.types():
        if g > gmax or n > nmax:
            continue
        for G in sg.enumerate_stable_graphs(g, n):
            if len(G.edges) != edges:
                continue
            needed = set(vertex_types(G))
            for e in range(edges):
                needed.update(vertex_types(sg.contract_edges(G, [e]).target))
            # only graphs whose every vertex type lies inside the cutoff
            if all(a <= gmax and b <= nmax for a, b in needed):
                yield G


def _validate_graphs(F, rep, box):
    R = rep._get("graph_rotation_invariance")
    N = rep._get("naturality")
    for G in _graphs_in_box(F, box, 1):
        h1, h2 = G.edges[0]
        for key in pg_basis(F, G):
            R.checked += 1
            alpha = {key: 1}
            _, lhs = pg_contract(F, G, 0, pg_B(F, G, h1, alpha))
            _, rhs = pg_contract(F, G, 0, pg_B(F, G, h2, alpha))
            if lhs != rhs:
                R.fail(f"graph {sg.encoding(G)} basis {key}: B at the two ends differ after contraction")
    for edges in (1, 2):
        for G in _graphs_in_box(F, box, edges):
            for phi in sg.automorphisms(G):
                hmap = dict(enumerate(phi))
                for e in range(edges):
                    h1, h2 = G.edges[e]
                    e2 = sg.edge_index(G, (phi[h1], phi[h2]))
                    for key in pg_basis(F, G):
                        N.checked += 1
                        alpha = {key: 1}
                        con, res = pg_contract(F, G, e, alpha)
                        con2, res2 = pg_contract(F, G, e2, pg_transport(F, G, G, hmap, alpha))
                        moved = pg_transport(F, con.target, con2.target, hmap, res)
                        if moved != res2:
                            N.fail(f"graph {sg.encoding(G)} edge {e} automorphism {phi} basis {key}")
    R = rep._get("order_independence")
    for G in _graphs_in_box(F, box, 2):
        for key in pg_basis(F, G):
            R.checked += 1
            alpha = {key: 1}
            routes = []
            for e, f in ((0, 1), (1, 0)):
                con, res = pg_contract(F, G, e, alpha)
                f2 = sg.edge_index(con.target, G.edges[f])
                con2, res2 = pg_contract(F, con.target, f2, res)
                routes.append(res2)
            if routes[0] != routes[1]:
                R.fail(f"graph {sg.encoding(G)} basis {key}: contraction order matters")


def _validate_weights(F, rep, types):
    R = rep._get("weight_grading")
    tset = set(types)
    for (g, n) in types:
        if (g, n) not in F.weights or len(F.weights[(g, n)]) != F.dim(g, n):
            R.fail(f"no weights for P({g},{n})")
            continue
        w = F.weights[(g, n)]
        for a in range(F.dim(g, n)):
            R.checked += 1
            if any(w[r] != w[a] for r, _ in F.d[(g, n)][a]):
                R.fail(f"d changes the weight of e{a} in P({g},{n})")
            for i in range(n):
                if any(w[r] != w[a] + 1 for r, _ in F.B[(g, n, i)][a]):
                    R.fail(f"B{i + 1} does not raise the weight of e{a} in P({g},{n}) by one")
            for i in range(n - 1):
                if any(w[r] != w[a] for r, _ in F.swap[(g, n, i)][a]):
                    R.fail(f"s{i + 1} changes the weight of e{a} in P({g},{n})")
            if (g + 1, n - 2) in tset:
                wt = F.weights[(g + 1, n - 2)]
                for i, j in itertools.combinations(range(n), 2):
                    if any(wt[r] != w[a] for r, _ in F.loop[(g, n, i, j)][a]):
                        R.fail(f"loop c{i + 1}{j + 1} changes the weight of e{a} in P({g},{n})")
    for key, table in F.pair.items():
        g, n, i, g2, n2, j = key
        if (g, n) not in tset or (g2, n2) not in tset or (g + g2, n + n2 - 2) not in tset:
            continue
        wa, wb, wt = F.weights[(g, n)], F.weights[(g2, n2)], F.weights[(g + g2, n + n2 - 2)]
        for (a, b), col in table.items():
            R.checked += 1
            if any(wt[r] != wa[a] + wb[b] for r, _ in col):
                R.fail(f"pair c{i + 1}{j + 1} on P({g},{n})xP({g2},{n2}) is not additive in weight")


def validate_s1_modular_axioms(F: OperadFixture, cutoff=(2, 4)) -> AxiomReport:
    """Exhaustively check the framed modular operad axioms for g <= cutoff[0], n <= cutoff[1]."""
    gmax, nmax = cutoff
    types = [t for t in F.types() if t[0] <= gmax and t[1] <= nmax]
    for g in range(gmax + 1):
        for n in range(nmax + 1):
            if sg.is_stable_type(g, n) and not F.has(g, n):
                raise IncompleteFixture(f"no space P({g},{n}) within cutoff")
    rep = AxiomReport(F.name, tuple(cutoff))
    for name in AXIOMS:
        rep._get(name)
    _validate_spaces(F, rep, types)
    _validate_loops(F, rep, types)
    _validate_pairs(F, rep, types)
    _validate_graphs(F, rep, cutoff)
    if F.weights:
        _validate_weights(F, rep, types)
    return rep


def search_torus_signs(cutoff=(2, 4), types=None):
    """First sign assignment (in lexicographic order, +1 before -1) passing every axiom.

    Returns (signs, report) or (None, None).  Table-level axioms are checked
    first since they are cheap and already rule out most assignments.
    """
    types = default_types() if types is None else types
    box = [t for t in types if t[0] <= cutoff[0] and t[1] <= cutoff[1]]
    for signs in itertools.product((1, -1), repeat=4):
        F = build_torus(types, signs)
        quick = AxiomReport(F.name, tuple(cutoff))
        _validate_loops(F, quick, box)
        _validate_pairs(F, quick, box)
        if not quick.ok:
            continue
        rep = validate_s1_modular_axioms(F, cutoff)
        if rep.ok:
            return signs, rep
    return None, None
