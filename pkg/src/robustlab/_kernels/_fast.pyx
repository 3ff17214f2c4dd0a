# cython: language_level=3
"""Compiled kernels: modular elimination, bounded spark DFS, sign-walk sums.

Mirrors robustlab._kernels._pure exactly (same statuses, same node counting,
same traversal order) so the two lanes are interchangeable; 128-bit products
keep every operation exact for odd primes below 2^63.
"""

import numpy as np

cimport numpy as cnp
from libc.stdint cimport int64_t, uint64_t
from libc.stdlib cimport free, malloc

cdef extern from *:
    ctypedef unsigned long long uint128 "unsigned __int128"

LANE = "fast"

DFS_COMPLETE = 0
DFS_LIMIT = 1
DFS_BUDGET = 2


cdef inline uint64_t mulmod(uint64_t a, uint64_t b, uint64_t p) nogil:
    return <uint64_t>((<uint128>a * b) % p)


cdef inline uint64_t submod(uint64_t a, uint64_t b, uint64_t p) nogil:
    return a - b if a >= b else a + (p - b)


cdef uint64_t modinv(uint64_t a, uint64_t p) nogil:
    # p prime; a != 0 mod p
    cdef uint64_t result = 1
    cdef uint64_t base = a % p
    cdef uint64_t e = p - 2
    while e:
        if e & 1:
            result = mulmod(result, base, p)
        base = mulmod(base, base, p)
        e >>= 1
    return result


def fp_rank_profile(mat, p):
    """Rank and greedy-leftmost independent column indices over F_p."""
    cdef cnp.ndarray[cnp.uint64_t, ndim=2, mode="c"] m = \
        np.ascontiguousarray(mat, dtype=np.uint64)
    cdef uint64_t pp = p
    cdef Py_ssize_t n = m.shape[0], d = m.shape[1]
    cdef Py_ssize_t rank = 0, i, j, t, lead
    cdef uint64_t f, inv
    cdef uint64_t *red = <uint64_t *>malloc(n * n * sizeof(uint64_t))
    cdef Py_ssize_t *pivrow = <Py_ssize_t *>malloc(n * sizeof(Py_ssize_t))
    cdef uint64_t *tmp = <uint64_t *>malloc(n * sizeof(uint64_t))
    if red == NULL or pivrow == NULL or tmp == NULL:
        free(red); free(pivrow); free(tmp)
        raise MemoryError()
    profile = []
    try:
        for j in range(d):
            if rank == n:
                break
            for i in range(n):
                tmp[i] = m[i, j]
            for t in range(rank):
                f = tmp[pivrow[t]]
                if f:
                    for i in range(n):
                        tmp[i] = submod(tmp[i], mulmod(f, red[t * n + i], pp), pp)
            lead = n
            for i in range(n):
                if tmp[i]:
                    lead = i
                    break
            if lead == n:
                continue
            inv = modinv(tmp[lead], pp)
            for i in range(n):
                red[rank * n + i] = mulmod(tmp[i], inv, pp)
            pivrow[rank] = lead
            rank += 1
            profile.append(j)
        return rank, profile
    finally:
        free(red); free(pivrow); free(tmp)


def spark_dfs(cols, p, cap, budget, collect_limit=1):
    """Bounded DFS over dependent column subsets; see the pure lane docstring."""
    cdef cnp.ndarray[cnp.uint64_t, ndim=2, mode="c"] c = \
        np.ascontiguousarray(cols, dtype=np.uint64)
    cdef uint64_t pp = p
    cdef Py_ssize_t d = c.shape[0], n = c.shape[1]
    cdef Py_ssize_t capn = cap
    cdef long long budg = budget
    cdef long long limit = collect_limit
    cdef long long nodes = 0
    founds = []
    if capn < 1 or d == 0:
        return DFS_COMPLETE, 0, founds

    cdef uint64_t *red = <uint64_t *>malloc(capn * n * sizeof(uint64_t))
    cdef Py_ssize_t *pivrow = <Py_ssize_t *>malloc(capn * sizeof(Py_ssize_t))
    cdef Py_ssize_t *chosen = <Py_ssize_t *>malloc(capn * sizeof(Py_ssize_t))
    cdef Py_ssize_t *jcur = <Py_ssize_t *>malloc((capn + 1) * sizeof(Py_ssize_t))
    cdef uint64_t *tmp = <uint64_t *>malloc(n * sizeof(uint64_t))
    if red == NULL or pivrow == NULL or chosen == NULL or jcur == NULL or tmp == NULL:
        free(red); free(pivrow); free(chosen); free(jcur); free(tmp)
        raise MemoryError()

    cdef Py_ssize_t r = 0, i, j, t, lead
    cdef uint64_t f, inv
    cdef int status = DFS_COMPLETE
    jcur[0] = 0
    try:
        while True:
            j = jcur[r]
            if j >= d:
                if r == 0:
                    status = DFS_COMPLETE
                    break
                r -= 1
                continue
            jcur[r] = j + 1
            nodes += 1
            if budg > 0 and nodes > budg:
                status = DFS_BUDGET
                break
            for i in range(n):
                tmp[i] = c[j, i]
            for t in range(r):
                f = tmp[pivrow[t]]
                if f:
                    for i in range(n):
                        tmp[i] = submod(tmp[i], mulmod(f, red[t * n + i], pp), pp)
            lead = n
            for i in range(n):
                if tmp[i]:
                    lead = i
                    break
            if lead == n:
                founds.append(tuple([chosen[t] for t in range(r)] + [j]))
                if len(founds) >= limit:
                    status = DFS_LIMIT
                    break
                continue
            if r + 1 < capn:
                inv = modinv(tmp[lead], pp)
                for i in range(n):
                    red[r * n + i] = mulmod(tmp[i], inv, pp)
                pivrow[r] = lead
                chosen[r] = j
                r += 1
                jcur[r] = j + 1
        return status, nodes, founds
    finally:
        free(red); free(pivrow); free(chosen); free(jcur); free(tmp)


def enumerate_signed_sums(res, p):
    """All 2^k signed sums of res in Gray-code order (see pure lane)."""
    cdef Py_ssize_t k = len(res)
    cdef Py_ssize_t total = (<Py_ssize_t>1) << k
    cdef Py_ssize_t t, i
    cdef uint64_t pp, cur
    cdef int64_t scur
    cdef unsigned long long gray, prev, flip, bit
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] out_u, inc_u, dec_u
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out_i, twos_i
    if p > 0:
        pp = p
        out_u = np.empty(total, dtype=np.uint64)
        arr = [int(a) % p for a in res]
        # increments/decrements by 2a are precomputed as nonnegative residues
        inc_u = np.array([(2 * a) % p for a in arr], dtype=np.uint64)
        dec_u = np.array([(p - (2 * a) % p) % p for a in arr], dtype=np.uint64)
        cur = sum(arr) % p
        out_u[0] = cur
        prev = 0
        for t in range(1, total):
            gray = t ^ (t >> 1)
            flip = gray ^ prev
            bit = flip
            i = 0
            while not (bit & 1):
                bit >>= 1
                i += 1
            if gray & flip:
                cur = (cur + dec_u[i]) % pp
            else:
                cur = (cur + inc_u[i]) % pp
            out_u[t] = cur
            prev = gray
        return out_u
    else:
        out_i = np.empty(total, dtype=np.int64)
        twos_i = np.array([2 * int(a) for a in res], dtype=np.int64)
        scur = sum(int(a) for a in res)
        out_i[0] = scur
        prev = 0
        for t in range(1, total):
            gray = t ^ (t >> 1)
            flip = gray ^ prev
            bit = flip
            i = 0
            while not (bit & 1):
                bit >>= 1
                i += 1
            if gray & flip:
                scur -= twos_i[i]
            else:
                scur += twos_i[i]
            out_i[t] = scur
            prev = gray
        return out_i
