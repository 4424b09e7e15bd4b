"""Pure-Python integer kernels; the compiled module mirrors these exactly."""


def koszul_sort_sign(parities, order) -> int:
    """Sign of reordering factors so that factor k moves to position order[k]."""
    sign = 1
    m = len(order)
    for a in range(m):
        if not parities[a]:
            continue
        for b in range(a + 1, m):
            if parities[b] and order[a] > order[b]:
                sign = -sign
    return sign


def bounded_exponents(n: int, depth: int, total: int) -> list:
    """Exponent vectors of length n with entries <= depth and sum <= total, lexicographic."""
    if total < 0:
        return []
    out = []
    cur = [0] * n

    def rec(i, left):
        if i == n:
            out.append(tuple(cur))
            return
        for k in range(min(depth, left) + 1):
            cur[i] = k
            rec(i + 1, left - k)
        cur[i] = 0

    rec(0, total)
    return out
