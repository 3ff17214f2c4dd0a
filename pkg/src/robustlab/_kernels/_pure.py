"""Pure-Python fallback kernels.

Same contracts as the compiled `_fast` extension; arbitrary-precision Python
integers make every operation exact by construction.  Used automatically when
the extension is unavailable or when ROBUSTLAB_PURE=1 is set.
"""

import numpy as np

LANE = "pure"

# spark_dfs / fp_rank_profile status codes (shared with the compiled lane)
DFS_COMPLETE = 0
DFS_LIMIT = 1
DFS_BUDGET = 2


def _reduce_mod(col, pivots, p):
    """Reduce col against normalized pivot columns; returns a new list."""
    v = list(col)
    for pivot_row, pcol in pivots:
        f = v[pivot_row]
        if f:
            v = [(x - f * y) % p for x, y in zip(v, pcol)]
    return v


def _normalize_mod(v, p):
    lead = next(i for i, x in enumerate(v) if x)
    inv = pow(v[lead], p - 2, p)
    return lead, [(x * inv) % p for x in v]


def fp_rank_profile(mat, p):
    """Rank and greedy-leftmost independent column indices of mat over F_p.

    mat: 2D array-like (rows x cols) of residues in [0, p).
    """
    mat = np.asarray(mat)
    n, d = mat.shape
    cols = [[int(x) for x in mat[:, j]] for j in range(d)]
    pivots = []
    profile = []
    for j in range(d):
        if len(pivots) == n:
            break
        v = _reduce_mod(cols[j], pivots, p)
        if any(v):
            pivots.append(_normalize_mod(v, p))
            profile.append(j)
    return len(profile), profile


def spark_dfs(cols, p, cap, budget, collect_limit=1):
    """Depth-first search for dependent column subsets of size <= cap.

    cols: (d, n) array of residues, cols[j] is column j.
    Enumerates independent subsets in lexicographic order; every extension of
    a path by a later column is tested by exact modular reduction, and a
    column reducing to zero closes a dependent subset.  Dependent subsets are
    recorded and never descended into, so each reported subset is a circuit
    (all proper prefixes independent).

    Returns (status, nodes_used, founds) where founds is a list of index
    tuples.  status: DFS_COMPLETE (search space exhausted), DFS_LIMIT
    (collect_limit dependencies found), DFS_BUDGET (node budget exhausted).
    budget <= 0 means unbounded.
    """
    cols = np.asarray(cols)
    d = cols.shape[0]
    pycols = [[int(x) for x in c] for c in cols]
    founds = []
    nodes = 0

    def rec(start, pivots, chosen):
        nonlocal nodes
        for j in range(start, d):
            nodes += 1
            if budget > 0 and nodes > budget:
                return DFS_BUDGET
            v = _reduce_mod(pycols[j], pivots, p)
            if not any(v):
                founds.append(tuple(chosen + [j]))
                if len(founds) >= collect_limit:
                    return DFS_LIMIT
                continue
            if len(pivots) + 1 < cap:
                st = rec(j + 1, pivots + [_normalize_mod(v, p)], chosen + [j])
                if st != DFS_COMPLETE:
                    return st
        return DFS_COMPLETE

    status = rec(0, [], []) if cap >= 1 and d > 0 else DFS_COMPLETE
    return status, nodes, founds


def enumerate_signed_sums(res, p):
    """All 2^k signed sums of the residue tuple res, in Gray-code order.

    Exact walk over sign assignments; returns uint64 residues mod p when
    p > 0, int64 signed integers when p == 0.  The assignment order is
    internal; callers only aggregate counts.
    """
    k = len(res)
    total = 1 << k
    if p > 0:
        out = np.empty(total, dtype=np.uint64)
        cur = sum(res) % p
        twos = [(2 * a) % p for a in res]
        out[0] = cur
        prev = 0
        for t in range(1, total):
            gray = t ^ (t >> 1)
            bit = gray ^ prev
            i = bit.bit_length() - 1
            if gray & bit:
                cur = (cur - twos[i]) % p
            else:
                cur = (cur + twos[i]) % p
            out[t] = cur
            prev = gray
    else:
        out = np.empty(total, dtype=np.int64)
        cur = sum(res)
        out[0] = cur
        prev = 0
        for t in range(1, total):
            gray = t ^ (t >> 1)
            bit = gray ^ prev
            i = bit.bit_length() - 1
            if gray & bit:
                cur -= 2 * res[i]
            else:
                cur += 2 * res[i]
            out[t] = cur
            prev = gray
    return out
