# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled integer kernels; see _kernels_py for the reference versions."""


def koszul_sort_sign(parities, order) -> int:
    cdef Py_ssize_t m = len(order), a, b
    cdef int sign = 1
    cdef list par = [1 if p else 0 for p in parities]
    cdef list odr = list(order)
    cdef long oa
    for a in range(m):
        if not par[a]:
            continue
        oa = odr[a]
        for b in range(a + 1, m):
            if par[b] and oa > <long>odr[b]:
                sign = -sign
    return sign


def bounded_exponents(int n, int depth, int total):
    cdef list out = []
    cdef int[64] cur
    cdef int[64] left
    cdef int i, k, top
    if total < 0:
        return out
    if n > 64:
        raise ValueError("at most 64 exponents")
    if n == 0:
        return [()]
    for i in range(n):
        cur[i] = 0
    left[0] = total
    i = 0
    cur[0] = 0
    # iterative odometer over the bounded simplex, lexicographic order
    while True:
        # descend: fill positions i+1.. with zeros
        while i < n - 1:
            left[i + 1] = left[i] - cur[i]
            i += 1
            cur[i] = 0
        out.append(tuple([cur[k] for k in range(n)]))
        # advance: increase the deepest position that can grow
        while i >= 0:
            top = depth if depth < left[i] else left[i]
            if cur[i] < top:
                cur[i] += 1
                break
            cur[i] = 0
            i -= 1
        if i < 0:
            return out
