"""Independent brute-force oracles; they share no code with the package."""
import itertools
from fractions import Fraction
from math import factorial


def _compositions(total, slots):
    if slots == 0:
        if total == 0:
            yield ()
        return
    for k in range(total + 1):
        for rest in _compositions(total - k, slots - 1):
            yield (k,) + rest


def _connected(nv, mult):
    seen, stack = {0}, [0]
    while stack:
        u = stack.pop()
        for w in range(nv):
            if w not in seen and mult.get((min(u, w), max(u, w)), 0):
                seen.add(w)
                stack.append(w)
    return len(seen) == nv


def naive_graph_count(g, n):
    """Count stable graphs of type (g, n) by generating vertex data and filtering.

    A graph is determined by vertex genera, loops per vertex, edge multiplicities
    between distinct vertices and the vertex of each leg.  Isomorphism classes are
    found by minimising over all vertex relabellings.
    """
    chi = 2 * g - 2 + n
    classes = set()
    for nv in range(1, chi + 1):
        pairs = list(itertools.combinations(range(nv), 2))
        perms = list(itertools.permutations(range(nv)))
        for E in range(nv - 1, g + nv):
            h1 = E - nv + 1
            for dist in _compositions(E, nv + len(pairs)):
                loops = dist[:nv]
                mult = dict(zip(pairs, dist[nv:]))
                if not _connected(nv, mult):
                    continue
                for genus in _compositions(g - h1, nv):
                    for legs in itertools.product(range(nv), repeat=n):
                        val = [2 * loops[v] + legs.count(v) + sum(m for p, m in mult.items() if v in p)
                               for v in range(nv)]
                        if any(2 * genus[v] - 2 + val[v] <= 0 for v in range(nv)):
                            continue
                        best = None
                        for p in perms:
                            inv = [0] * nv
                            for a, b in enumerate(p):
                                inv[b] = a
                            code = (tuple(genus[inv[v]] for v in range(nv)),
                                    tuple(loops[inv[v]] for v in range(nv)),
                                    tuple(sorted(((min(p[a], p[b]), max(p[a], p[b])), m)
                                                 for (a, b), m in mult.items())),
                                    tuple(p[v] for v in legs))
                            if best is None or code < best:
                                best = code
                        classes.add((nv, best))
    return len(classes)


def brute_automorphisms(G):
    """|Aut G| by trying every half-edge permutation that fixes the legs."""
    halves = sorted(h for hs in G.vhalf for h in hs)
    vert = {h: v for v, hs in enumerate(G.vhalf) for h in hs}
    partner = {}
    for a, b in G.edges:
        partner[a], partner[b] = b, a
    inner = [h for h in halves if h in partner]
    count = 0
    for img in itertools.permutations(inner):
        p = dict(zip(inner, img))
        p.update({h: h for h in G.legs})
        if any(p[partner[h]] != partner[p[h]] for h in inner):
            continue
        # must map vertices to vertices of equal genus
        vmap = {}
        ok = True
        for h in halves:
            a, b = vert[h], vert[p[h]]
            if vmap.setdefault(a, b) != b or G.genus[a] != G.genus[b]:
                ok = False
                break
        if ok and len(set(vmap.values())) == len(vmap):
            count += 1
    return count


def genus0_closed(ks):
    """<tau_k1 ... tau_kn>_0 = (n-3)! / prod k_i! (multinomial)."""
    n = len(ks)
    if sum(ks) != n - 3:
        return Fraction(0)
    out = Fraction(factorial(n - 3))
    for k in ks:
        out /= factorial(k)
    return out


def bounded_exponents(n, depth, total):
    return [t for t in itertools.product(range(depth + 1), repeat=n) if sum(t) <= total]


def inversion_sign(parities, order):
    """Sign of sorting the odd factors by their target positions, via bubble sort."""
    items = [(o, p) for o, p in zip(order, parities)]
    sign = 1
    for i in range(len(items)):
        for j in range(len(items) - 1 - i):
            if items[j][0] > items[j + 1][0]:
                if items[j][1] and items[j + 1][1]:
                    sign = -sign
                items[j], items[j + 1] = items[j + 1], items[j]
    return sign


__all__ = ["naive_graph_count", "brute_automorphisms", "genus0_closed", "bounded_exponents",
           "inversion_sign"]
