"""Trivializations of circle actions and the induced FP-algebra structure.

A finite model is a graded space V (basis 0..dim-1) with a differential b of
degree -1, a circle operator B of degree +1 and a graded symmetric pairing of
degree 0.  Operators are dense square matrices of Fractions (V is tiny).

A trivialization s = 1 + R_1 u + R_2 u^2 + ... is a chain map
(V, b) -> (V[[u]], b + uB); order by order this is
b R_j - R_j b + B R_{j-1} = 0 with R_0 = 1.

Elements of V[u^-1] are written x u^-i; the degree of x u^-i is |x| + 2i.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .linalg import add_term
from .operad_fixture import OperadFixture, koszul_sort_sign


class InvalidAlgebra(ValueError):
    pass


class OrderError(ValueError):
    pass


# ================================================================ matrices

def zeros(n: int) -> list:
    return [[Fraction(0)] * n for _ in range(n)]


def identity(n: int) -> list:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def matmul(A: list, B: list) -> list:
    n = len(A)
    out = zeros(n)
    for i in range(n):
        Ai, oi = A[i], out[i]
        for k in range(n):
            a = Ai[k]
            if a:
                Bk = B[k]
                for j in range(n):
                    if Bk[j]:
                        oi[j] += a * Bk[j]
    return out


def matadd(A: list, B: list, s=1) -> list:
    return [[a + s * b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def matvec(A: list, x: list) -> list:
    return [sum((a * b for a, b in zip(row, x) if a and b), Fraction(0)) for row in A]


def is_zero(A: list) -> bool:
    return not any(any(r) for r in A)


def matrix(n: int, entries: dict) -> list:
    """Matrix from {(row, col): value}; column j is the image of basis vector j."""
    M = zeros(n)
    for (i, j), c in entries.items():
        M[i][j] = Fraction(c)
    return M


# ================================================================ series inversion

def invert_unital_series(R: list, order: int) -> list:
    """T_0..T_order with sum_{i+j=k} T_i R_j = 0 for k >= 1 (R = [R_1, R_2, ...])."""
    if order < 0:
        raise ValueError("order must be nonnegative")
    if not R:
        raise ValueError("need the size of V; pass at least R_1")
    n = len(R[0])

    def r(j):
        return R[j - 1] if j <= len(R) else None

    T = [identity(n)]
    for k in range(1, order + 1):
        acc = zeros(n)
        for i in range(k):
            Rj = r(k - i)
            if Rj is not None:
                acc = matadd(acc, matmul(T[i], Rj))
        T.append(matadd(zeros(n), acc, -1))
    return T


def inversion_defect(R: list, T: list) -> list:
    """The orders k <= len(T)-1 where sum_{i+j=k} T_i R_j differs from delta_{k0}."""
    n = len(T[0])
    bad = []
    for k in range(len(T)):
        acc = zeros(n)
        for i in range(k + 1):
            j = k - i
            Rj = identity(n) if j == 0 else (R[j - 1] if j <= len(R) else None)
            if Rj is not None:
                acc = matadd(acc, matmul(T[i], Rj))
        if acc != (identity(n) if k == 0 else zeros(n)):
            bad.append(k)
    return bad


# ================================================================ the model

@dataclass
class TrivializationSeries:
    """Circle model (V, b, B, pairing) with the operators R_1, R_2, ..."""
    degrees: tuple
    b: list
    B: list
    pairing: list              # pairing[i][j] = <e_i, e_j>
    R: list                    # [R_1, R_2, ...]
    names: tuple = ()

    @property
    def dim(self) -> int:
        return len(self.degrees)

    def pair(self, x: list, y: list) -> Fraction:
        P = self.pairing
        return sum((x[i] * P[i][j] * y[j] for i in range(self.dim) if x[i]
                    for j in range(self.dim) if y[j] and P[i][j]), Fraction(0))

    def R_(self, j: int) -> list:
        if j == 0:
            return identity(self.dim)
        return self.R[j - 1] if j <= len(self.R) else zeros(self.dim)

    def basis_vector(self, a: int) -> list:
        return [Fraction(int(i == a)) for i in range(self.dim)]

    def validate(self) -> "TrivializationSeries":
        problems = validation_problems(self)
        if problems:
            raise InvalidAlgebra("; ".join(problems))
        return self


def _degree_of_map(M: list, degrees, shift: int) -> bool:
    return all(not M[i][j] or degrees[i] == degrees[j] + shift
               for i in range(len(M)) for j in range(len(M)))


def validation_problems(V: TrivializationSeries) -> list:
    n, deg, P = V.dim, V.degrees, V.pairing
    out = []
    if not _degree_of_map(V.b, deg, -1):
        out.append("b is not of degree -1")
    if not _degree_of_map(V.B, deg, 1):
        out.append("B is not of degree +1")
    for j, Rj in enumerate(V.R, 1):
        if not _degree_of_map(Rj, deg, 2 * j):
            out.append(f"R_{j} is not of degree {2 * j}")
    if not is_zero(matmul(V.b, V.b)):
        out.append("b^2 != 0")
    if not is_zero(matmul(V.B, V.B)):
        out.append("B^2 != 0")
    if not is_zero(matadd(matmul(V.b, V.B), matmul(V.B, V.b))):
        out.append("bB + Bb != 0")
    for i in range(n):
        for j in range(n):
            if P[i][j] and deg[i] + deg[j] != 0:
                out.append("pairing is not of degree 0")
            if P[i][j] != (-1) ** (deg[i] * deg[j] % 2) * P[j][i]:
                out.append("pairing is not graded symmetric")
    if _rank(P) != n:
        out.append("pairing is degenerate")
    for i in range(n):
        e = V.basis_vector(i)
        for j in range(n):
            f = V.basis_vector(j)
            s = (-1) ** (deg[i] % 2)
            if V.pair(matvec(V.b, e), f) + s * V.pair(e, matvec(V.b, f)):
                out.append("b is not graded anti-self-adjoint")
            if V.pair(matvec(V.B, e), f) - s * V.pair(e, matvec(V.B, f)):
                out.append("B is not graded self-adjoint")
    for j in range(1, len(V.R) + 1):
        lhs = matadd(matmul(V.b, V.R_(j)), matmul(V.R_(j), V.b), -1)
        lhs = matadd(lhs, matmul(V.B, V.R_(j - 1)))
        if not is_zero(lhs):
            out.append(f"s is not a chain map at order u^{j}")
    # the chain map condition at the first order past the given R's
    j = len(V.R) + 1
    if not is_zero(matmul(V.B, V.R_(j - 1))):
        out.append(f"s is not a chain map at order u^{j}")
    return sorted(set(out))


def _rank(M: list) -> int:
    from .linalg import rank
    return rank([{j: c for j, c in enumerate(row) if c} for row in M])


# ================================================================ the edge pairing

def edge_pairing(i: int, j: int, x: list, y: list, V: TrivializationSeries, T: list) -> Fraction:
    """H_{i,j}(x u^-i, y u^-j) = <(-1)^j sum_{l<=j} R_l T_{i+j+1-l} x, y>."""
    if i < 0 or j < 0:
        raise ValueError("exponents must be nonnegative")
    if len(T) < i + j + 2:
        raise OrderError(f"need T up to order {i + j + 1}, have {len(T) - 1}")
    acc = zeros(V.dim)
    for l in range(j + 1):
        acc = matadd(acc, matmul(V.R_(l), T[i + j + 1 - l]))
    val = V.pair(matvec(acc, x), y)
    return -val if j & 1 else val


def symmetrize_pairing(H, degree):
    """H^sym(a, b) = (H(a, b) + (-1)^{|a||b|} H(b, a)) / 2 for callables H and degree."""
    def Hsym(a, b):
        s = -1 if degree(a) * degree(b) % 2 else 1
        return Fraction(H(a, b) + s * H(b, a), 2)
    return Hsym


class EdgeForm:
    """H^sym on basis elements (a, i) = e_a u^-i of V[u^-1], memoised."""

    def __init__(self, V: TrivializationSeries, depth: int):
        self.V = V
        self.T = invert_unital_series(V.R or [zeros(V.dim)], 2 * depth + 1)
        self._cache = {}
        basis = [V.basis_vector(a) for a in range(V.dim)]
        self._H = lambda p, q: edge_pairing(p[1], q[1], basis[p[0]], basis[q[0]], V, self.T)
        self._sym = symmetrize_pairing(self._H, self.degree)

    def degree(self, p) -> int:
        return self.V.degrees[p[0]] + 2 * p[1]

    def __call__(self, p, q) -> Fraction:
        key = (p, q)
        v = self._cache.get(key)
        if v is None:
            v = self._sym(p, q)
            self._cache[key] = v
        return v


def check_edge_identity(V: TrivializationSeries, depth: int = 2):
    """[b + uB, H^sym] against -<B x, y> on u^0 (x) u^0 and 0 elsewhere.

    Returns (checked, first witness or None).
    """
    Hs = EdgeForm(V, depth + 1)
    def D(p):
        a, i = p
        out = [((r, i), V.b[r][a]) for r in range(V.dim) if V.b[r][a]]
        if i:
            out += [((r, i - 1), V.B[r][a]) for r in range(V.dim) if V.B[r][a]]
        return out

    checked = 0
    for a, b in itertools.product(range(V.dim), repeat=2):
        for i, j in itertools.product(range(depth + 1), repeat=2):
            p, q = (a, i), (b, j)
            lhs = sum((c * Hs(p2, q) for p2, c in D(p)), Fraction(0))
            s = -1 if Hs.degree(p) & 1 else 1
            lhs += s * sum((c * Hs(p, q2) for q2, c in D(q)), Fraction(0))
            want = Fraction(0)
            if i == 0 and j == 0:
                want = -V.pair(matvec(V.B, V.basis_vector(a)), V.basis_vector(b))
            checked += 1
            if lhs != want:
                return checked, (p, q, lhs, want)
    return checked, None


# ================================================================ cyclic algebras

@dataclass
class CyclicAlgebra:
    """A cyclic algebra over a fixture: rho(g, n, key) is a tensor in V^{(x)n}.

    Tensors are dicts {tuple of basis indices: coefficient}.
    """
    fixture: OperadFixture
    V: TrivializationSeries
    action: object                      # callable (g, n, key) -> tensor
    _memo: dict = field(default_factory=dict)

    def rho(self, g: int, n: int, key: int) -> dict:
        k = (g, n, key)
        t = self._memo.get(k)
        if t is None:
            t = self.action(g, n, key)
            self._memo[k] = t
        return t


def _apply_at(V: TrivializationSeries, M: list, slot: int, tensor: dict, odd: bool) -> dict:
    """Apply M at one slot with the Koszul sign of passing the earlier factors."""
    out = {}
    deg = V.degrees
    for word, c in tensor.items():
        s = -1 if odd and sum(deg[w] for w in word[:slot]) & 1 else 1
        a = word[slot]
        for r in range(V.dim):
            if M[r][a]:
                add_term(out, word[:slot] + (r,) + word[slot + 1:], s * c * M[r][a])
    return out


def _contract(V: TrivializationSeries, tensor: dict, i: int, j: int) -> dict:
    """Apply the pairing to slots i < j after moving slot j next to slot i."""
    out = {}
    deg, P = V.degrees, V.pairing
    for word, c in tensor.items():
        p = P[word[i]][word[j]]
        if not p:
            continue
        mid = sum(deg[w] for w in word[i + 1:j])
        s = -1 if deg[word[j]] * mid & 1 else 1
        add_term(out, word[:i] + word[i + 1:j] + word[j + 1:], s * c * p)
    return out


def _permute(V: TrivializationSeries, tensor: dict, perm) -> dict:
    """Move slot t to slot perm[t], with the Koszul sign."""
    out = {}
    deg = V.degrees
    for word, c in tensor.items():
        s = koszul_sort_sign([deg[w] & 1 for w in word], list(perm))
        new = [0] * len(word)
        for t, w in enumerate(word):
            new[perm[t]] = w
        add_term(out, tuple(new), s * c)
    return out


def frobenius_correlators(V: TrivializationSeries, algebra: dict, counit: dict, g: int, n: int) -> dict:
    """omega_{g,n} = sum eps(e^a1 ... e^an E^g) e_a1 (x) ... (x) e_an for an even algebra.

    ``algebra`` maps (a, b) to a product vector {c: coef} on a subspace of V
    spanned by even basis vectors; ``counit`` maps basis indices to eps.
    """
    support = sorted({a for ab in algebra for a in ab})
    # dual basis inside the subspace with respect to the pairing
    sub = [[V.pairing[a][b] for b in support] for a in support]
    inv = _inverse(sub)
    dual = {a: {support[k]: inv[k][t] for k in range(len(support)) if inv[k][t]}
            for t, a in enumerate(support)}

    def mul(x: dict, y: dict) -> dict:
        out = {}
        for a, ca in x.items():
            for b, cb in y.items():
                for c, cc in algebra.get((a, b), {}).items():
                    add_term(out, c, ca * cb * cc)
        return out

    euler = {}
    for a in support:
        for c, v in mul({a: 1}, dual[a]).items():
            add_term(euler, c, v)
    out = {}
    for word in itertools.product(support, repeat=n):
        prod = dual[word[0]] if n else {}
        for a in word[1:]:
            prod = mul(prod, dual[a])
        for _ in range(g):
            prod = mul(prod, euler)
        val = sum((c * counit.get(a, 0) for a, c in prod.items()), Fraction(0))
        if val:
            out[word] = val
    return out


def _inverse(M: list) -> list:
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for col in range(n):
        piv = next(r for r in range(col, n) if A[r][col])
        A[col], A[piv] = A[piv], A[col]
        p = A[col][col]
        A[col] = [x / p for x in A[col]]
        for r in range(n):
            if r != col and A[r][col]:
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    return [row[n:] for row in A]


def torus_algebra(F: OperadFixture, V: TrivializationSeries, omega) -> CyclicAlgebra:
    """rho(theta_i1 ... theta_ik) = B^(i1) ... B^(ik) omega_{g,n}; rho kills tau.

    ``omega(g, n)`` gives the correlator tensors; they must be b-closed and pair
    to zero against B at any two slots for this to be a cyclic algebra, which
    validate_cyclic_algebra checks.
    """
    from .operad_fixture import _torus_word

    def action(g, n, key):
        word = _torus_word(n, key)
        if "T" in word:
            return {}
        t = dict(omega(g, n))
        for i in reversed(word):
            t = _apply_at(V, V.B, i, t, True)
        return t

    return CyclicAlgebra(F, V, action)


def validate_cyclic_algebra(A: CyclicAlgebra, types) -> list:
    """Problems with rho over the given types: degree, d, B, S_n and compositions."""
    F, V = A.fixture, A.V
    deg = V.degrees
    out = []
    tset = set(types)
    for g, n in types:
        for a in range(F.dim(g, n)):
            t = A.rho(g, n, a)
            if any(sum(deg[w] for w in word) != F.deg(g, n, a) for word in t):
                out.append(f"rho has nonzero degree on P({g},{n}) basis {a}")
            bt = {}
            for s in range(n):
                for k, c in _apply_at(V, V.b, s, t, True).items():
                    add_term(bt, k, c)
            dt = {}
            for r, c in F.d[(g, n)][a]:
                for k, v in A.rho(g, n, r).items():
                    add_term(dt, k, c * v)
            if bt != dt:
                out.append(f"rho is not a chain map on P({g},{n}) basis {a}")
            for i in range(n):
                lhs = {}
                for r, c in F.B[(g, n, i)][a]:
                    for k, v in A.rho(g, n, r).items():
                        add_term(lhs, k, c * v)
                if lhs != _apply_at(V, V.B, i, t, True):
                    out.append(f"rho is not circle equivariant on P({g},{n}) slot {i + 1}")
            for i in range(n - 1):
                lhs = {}
                for r, c in F.swap[(g, n, i)][a]:
                    for k, v in A.rho(g, n, r).items():
                        add_term(lhs, k, c * v)
                perm = list(range(n))
                perm[i], perm[i + 1] = i + 1, i
                if lhs != _permute(V, t, perm):
                    out.append(f"rho is not S_n equivariant on P({g},{n}) swap {i + 1}")
            if (g + 1, n - 2) in tset:
                for i, j in itertools.combinations(range(n), 2):
                    lhs = {}
                    for r, c in F.loop[(g, n, i, j)][a]:
                        for k, v in A.rho(g + 1, n - 2, r).items():
                            add_term(lhs, k, c * v)
                    if lhs != _contract(V, t, i, j):
                        out.append(f"rho does not respect loop sewing ({g},{n}) slots {i + 1},{j + 1}")
    for (g, n), (g2, n2) in itertools.product(types, repeat=2):
        if (g + g2, n + n2 - 2) not in tset or not n or not n2:
            continue
        for i in range(n):
            for j in range(n2):
                table = F.pair[(g, n, i, g2, n2, j)]
                for a in range(F.dim(g, n)):
                    ta = A.rho(g, n, a)
                    for b in range(F.dim(g2, n2)):
                        lhs = {}
                        for r, c in table.get((a, b), ()):
                            for k, v in A.rho(g + g2, n + n2 - 2, r).items():
                                add_term(lhs, k, c * v)
                        tb = A.rho(g2, n2, b)
                        both = {wa + wb: ca * cb for wa, ca in ta.items() for wb, cb in tb.items()}
                        if lhs != _contract(V, both, i, n + j):
                            out.append(f"rho does not respect pair sewing ({g},{n})x({g2},{n2}) "
                                       f"slots {i + 1},{j + 1}")
    return sorted(set(out))


# ================================================================ the FP action

def fp_action_tensor(space, A: CyclicAlgebra, Hs: EdgeForm, term) -> dict:
    """Image of a single FP term in V[u^-1]^{(x)n}: keys are tuples of (basis, exponent) per leg."""
    gi, keys, ks = term
    G = space.graphs[gi]
    V = A.V
    order = [h for hs in G.vhalf for h in hs]
    pieces = [A.rho(G.genus[v], len(G.vhalf[v]), keys[v]) for v in range(G.nv)]
    # target positions: edge half-edges first (edge by edge), then legs in order
    target = {}
    pos = 0
    for a, b in G.edges:
        target[a], target[b] = pos, pos + 1
        pos += 2
    for h in G.legs:
        target[h] = pos
        pos += 1
    perm = [target[h] for h in order]
    ne = 2 * len(G.edges)
    out = {}
    for combo in itertools.product(*(p.items() for p in pieces)):
        word = tuple(x for w, _ in combo for x in w)
        c = Fraction(1)
        for _, cv in combo:
            c *= cv
        s = koszul_sort_sign([V.degrees[x] & 1 for x in word], perm)
        placed = [None] * len(word)
        for t, x in enumerate(word):
            placed[perm[t]] = (x, ks[order[t]])
        val = s * c
        for e in range(len(G.edges)):
            val *= Hs(placed[2 * e], placed[2 * e + 1])
            if not val:
                break
        if val:
            add_term(out, tuple(placed[ne:]), val)
    return out


def fp_action(space, A: CyclicAlgebra, Hs: EdgeForm, elt) -> dict:
    out = {}
    for term, c in elt.terms.items():
        for k, v in fp_action_tensor(space, A, Hs, term).items():
            add_term(out, k, c * v)
    return out


def fp_algebra_action(space, A: CyclicAlgebra, Hs: EdgeForm, elt, inputs) -> Fraction:
    """Coefficient of the leg component ``inputs`` = ((basis, exponent), ...) in the image of elt."""
    return fp_action(space, A, Hs, elt).get(tuple(tuple(p) for p in inputs), Fraction(0))


def leg_differential(V: TrivializationSeries, tensor: dict) -> dict:
    """(b + uB) acting on every leg of a tensor over V[u^-1], Koszul signs included."""
    out = {}
    deg = V.degrees
    for word, c in tensor.items():
        pre = 0
        for t, (a, k) in enumerate(word):
            s = -1 if pre & 1 else 1
            for r in range(V.dim):
                if V.b[r][a]:
                    add_term(out, word[:t] + ((r, k),) + word[t + 1:], s * c * V.b[r][a])
                if k and V.B[r][a]:
                    add_term(out, word[:t] + ((r, k - 1),) + word[t + 1:], s * c * V.B[r][a])
            pre += deg[a]
    return out


def check_action_chain_map(space, A: CyclicAlgebra, Hs: EdgeForm, basis=None):
    """action((d + delta) t) == (b + uB) action(t) on every basis term; (checked, witness)."""
    from .feynman import FeynmanElement
    basis = space.basis() if basis is None else basis
    checked = 0
    for t in basis:
        x = FeynmanElement(space.g, space.n, {t: 1})
        lhs = fp_action(space, A, Hs, space.differential(x))
        rhs = leg_differential(A.V, fp_action_tensor(space, A, Hs, t))
        checked += 1
        if lhs != rhs:
            return checked, (t, lhs, rhs)
    return checked, None


# ================================================================ packaged models

def edge_model(m=1) -> TrivializationSeries:
    """Eight-dimensional model with b, B = [X, b] != 0 and s = 1 + uX, X self-adjoint.

    Basis: 1, x, y, xy (an even Frobenius algebra, x^2 = y^2 = 0, eps(xy) = 1),
    then w, w', v, v' with b w = v, b v' = -w'.  X: y -> xy, 1 -> w + x, w' -> xy.
    """
    names = ("1", "x", "y", "xy", "w", "w'", "v", "v'")
    deg = (0, 2, -2, 0, 2, -2, 1, -1)
    n = len(deg)
    P = matrix(n, {(0, 3): 1, (3, 0): 1, (1, 2): 1, (2, 1): 1, (4, 5): 1, (5, 4): 1,
                   (6, 7): 1, (7, 6): -1})
    b = matrix(n, {(6, 4): 1, (5, 7): -1})
    X = matrix(n, {(3, 2): m, (4, 0): m, (1, 0): m, (3, 5): m})
    B = matadd(matmul(X, b), matmul(b, X), -1)
    return TrivializationSeries(deg, b, B, P, [X], names)


def edge_model_frobenius():
    """Product and counit of the even algebra spanned by 1, x, y, xy in edge_model()."""
    algebra = {}
    elems = {0: (0, 0), 1: (1, 0), 2: (0, 1), 3: (1, 1)}     # exponents of x, y
    index = {v: k for k, v in elems.items()}
    for a, (p, q) in elems.items():
        for b, (r, s) in elems.items():
            e = (p + r, q + s)
            algebra[(a, b)] = {index[e]: 1} if e in index else {}
    return algebra, {3: 1}


def edge_model_algebra(F: OperadFixture, m=1) -> CyclicAlgebra:
    V = edge_model(m)
    algebra, counit = edge_model_frobenius()
    cache = {}

    def omega(g, n):
        if (g, n) not in cache:
            cache[(g, n)] = frobenius_correlators(V, algebra, counit, g, n)
        return cache[(g, n)]

    return torus_algebra(F, V, omega)


def with_series(V: TrivializationSeries, R: list) -> TrivializationSeries:
    return TrivializationSeries(V.degrees, V.b, V.B, V.pairing, list(R), V.names)


def exponential_model(X: list, b: list, pairing: list, degrees, order: int) -> TrivializationSeries:
    """s = exp(uX) conjugating b; valid when [X, [X, b]] = 0."""
    B = matadd(matmul(X, b), matmul(b, X), -1)
    R, P = [], identity(len(X))
    fact = 1
    for j in range(1, order + 1):
        P = matmul(P, X)
        fact *= j
        R.append([[c / fact for c in row] for row in P])
    return TrivializationSeries(tuple(degrees), b, B, pairing, R)


__all__ = ["InvalidAlgebra", "OrderError", "TrivializationSeries", "CyclicAlgebra", "EdgeForm",
           "invert_unital_series", "inversion_defect", "edge_pairing", "symmetrize_pairing",
           "check_edge_identity", "validation_problems", "frobenius_correlators",
           "torus_algebra", "validate_cyclic_algebra", "fp_action_tensor", "fp_action",
           "fp_algebra_action", "leg_differential", "check_action_chain_map", "edge_model",
           "edge_model_frobenius", "edge_model_algebra", "with_series", "exponential_model"]
