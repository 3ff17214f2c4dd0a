"""Exact rank, kernel, spark, and s-robustness over Q and prime fields.

Exactness discipline: over F_p all arithmetic is modular with 128-bit
products; over Q the elimination is integer-only (division-free up to gcd
normalization), and every reported witness is re-verified by exact
multiplication before it leaves this module.

Rational decisions on +-1 matrices with at most 26 rows are routed through a
proxy prime above every attainable minor (Hadamard bound r^(r/2)), which
makes modular rank agree with rational rank while keeping the hot path in
machine words; taller matrices fall back to arbitrary-precision integer
elimination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import _kernels
from .errors import BudgetExceededError, DimensionError, PreconditionError
from .matrices import ColumnSelection, SeedSpec, SignMatrix

#: Largest prime below 2^62; default modulus for prime-field work.  Any prime
#: above every attainable subset-sum magnitude makes F_p rank coincide with
#: rational rank on +-1 inputs.
DEFAULT_PRIME = 4611686018427387847

#: 2^61 - 1, a Mersenne prime; convenient alternative modulus.
MERSENNE61 = 2305843009213693951

# Largest row count for which r^(r/2) < DEFAULT_PRIME, i.e. the proxy-prime
# shortcut for rational decisions is certificate-grade.
_HADAMARD_SAFE_N = 26

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid far beyond 2^64."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = (x * x) % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    """Either the rationals or a prime field F_p with odd prime p."""

    kind: str
    p: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("rationals", "prime"):
            raise ValueError(f"unknown field kind {self.kind!r}")
        if self.kind == "prime":
            if self.p is None or self.p < 3 or self.p % 2 == 0 or not is_prime(self.p):
                raise ValueError(f"modulus must be an odd prime, got {self.p}")
        elif self.p is not None:
            raise ValueError("rationals take no modulus")

    @classmethod
    def rationals(cls) -> "FieldSpec":
        return cls("rationals")

    @classmethod
    def prime(cls, p: int = DEFAULT_PRIME) -> "FieldSpec":
        return cls("prime", p)

    @property
    def is_prime_field(self) -> bool:
        return self.kind == "prime"

    def __str__(self):
        return "Q" if self.kind == "rationals" else f"F_{self.p}"


@dataclass(frozen=True)
class FpVector:
    """Length-d vector over F_p (p odd prime) or over Z when p == 0.

    support is the cached index set of nonzero entries.
    """

    p: int
    entries: tuple
    support: tuple = field(default=(), compare=False)

    def __post_init__(self):
        entries = tuple(int(x) for x in self.entries)
        if self.p:
            if self.p < 3 or self.p % 2 == 0:
                raise ValueError(f"modulus must be an odd prime or 0, got {self.p}")
            if any(not (0 <= x < self.p) for x in entries):
                raise ValueError("entries must be residues in [0, p)")
        object.__setattr__(self, "entries", entries)
        object.__setattr__(
            self, "support", tuple(i for i, x in enumerate(entries) if x)
        )

    @property
    def dim(self) -> int:
        return len(self.entries)

    def is_zero(self) -> bool:
        return not self.support

    def restrict(self, indices) -> "FpVector":
        """Subvector on the given indices (keeps p)."""
        return FpVector(self.p, tuple(self.entries[i] for i in indices))

    def support_values(self) -> tuple:
        return tuple(self.entries[i] for i in self.support)


@dataclass(frozen=True)
class RankResult:
    rank: int
    independent_columns: ColumnSelection
    deficiency: int


@dataclass(frozen=True)
class SparkResult:
    """spark is None when infinite (full column rank) or when above the cap."""

    spark: Optional[int]
    infinite: bool
    above_cap: bool
    witness: Optional[FpVector]

    @property
    def is_finite(self) -> bool:
        return self.spark is not None


# -- residue/dense conversion helpers ---------------------------------------


def residue_matrix(m: SignMatrix, p: int) -> np.ndarray:
    """Entries mapped to residues: +1 -> 1, -1 -> p-1; uint64 (n, d)."""
    dense = m.dense()
    out = np.where(dense == 1, np.uint64(1), np.uint64(p - 1)).astype(np.uint64)
    return out


def residue_columns(m: SignMatrix, p: int) -> np.ndarray:
    """Residue matrix transposed to (d, n) with contiguous columns."""
    return np.ascontiguousarray(residue_matrix(m, p).T)


def _q_proxy_prime(n: int) -> Optional[int]:
    return DEFAULT_PRIME if n <= _HADAMARD_SAFE_N else None


# -- integer (rational-exact) elimination ------------------------------------


def _int_reduce(col, pivots):
    """Integer column reduction against pivot columns; gcd-normalized."""
    v = list(col)
    for pivot_row, pcol in pivots:
        b = v[pivot_row]
        if b:
            a = pcol[pivot_row]
            v = [a * x - b * y for x, y in zip(v, pcol)]
            g = 0
            for x in v:
                g = math.gcd(g, x)
                if g == 1:
                    break
            if g > 1:
                v = [x // g for x in v]
    return v


def _int_rank_profile(cols):
    pivots = []
    profile = []
    for j, col in enumerate(cols):
        v = _int_reduce(col, pivots)
        lead = next((i for i, x in enumerate(v) if x), None)
        if lead is not None:
            pivots.append((lead, v))
            profile.append(j)
    return len(profile), profile


def _int_spark_dfs(cols, cap, budget, collect_limit=1):
    """Arbitrary-precision mirror of the modular spark DFS."""
    d = len(cols)
    founds = []
    nodes = 0

    def rec(start, pivots, chosen):
        nonlocal nodes
        for j in range(start, d):
            nodes += 1
            if budget and nodes > budget:
                return _kernels.DFS_BUDGET
            v = _int_reduce(cols[j], pivots)
            lead = next((i for i, x in enumerate(v) if x), None)
            if lead is None:
                founds.append(tuple(chosen + [j]))
                if len(founds) >= collect_limit:
                    return _kernels.DFS_LIMIT
                continue
            if len(pivots) + 1 < cap:
                st = rec(j + 1, pivots + [(lead, v)], chosen + [j])
                if st != _kernels.DFS_COMPLETE:
                    return st
        return _kernels.DFS_COMPLETE

    status = rec(0, [], []) if cap >= 1 and d else _kernels.DFS_COMPLETE
    return status, nodes, founds


def _int_cols(m: SignMatrix):
    dense = m.dense()
    return [[int(x) for x in dense[:, j]] for j in range(m.d)]


# -- kernel vectors of dependent subsets --------------------------------------


def fp_subset_kernel_vector(m: SignMatrix, subset, p: int) -> FpVector:
    """Nonzero x (length d, support within subset) with M x = 0 over F_p.

    The subset must be linearly dependent; raises otherwise.
    """
    cols = [[int(v) for v in residue_matrix(m, p)[:, j]] for j in subset]
    coeffs = _fp_kernel_coeffs(cols, p)
    entries = [0] * m.d
    for j, c in zip(subset, coeffs):
        entries[j] = c
    vec = FpVector(p, tuple(entries))
    _verify_kernel(m, vec)
    return vec


def _fp_kernel_coeffs(cols, p):
    """Kernel coefficients of a dependent list of F_p column vectors.

    Runs the incremental reduction while tracking each reduced column as a
    combination of the originals; the first column that reduces to zero hands
    back its combination directly.
    """
    r = len(cols)
    pivots = []  # (pivot_row, column, combo)
    for idx in range(r):
        v = list(cols[idx])
        combo = [0] * r
        combo[idx] = 1
        for pivot_row, pcol, pcombo in pivots:
            f = v[pivot_row]
            if f:
                v = [(x - f * y) % p for x, y in zip(v, pcol)]
                combo = [(x - f * y) % p for x, y in zip(combo, pcombo)]
        lead = next((i for i, x in enumerate(v) if x), None)
        if lead is None:
            if not any(combo):
                raise RuntimeError("degenerate combination in kernel solve")
            return combo
        inv = pow(v[lead], p - 2, p)
        v = [(x * inv) % p for x in v]
        combo = [(x * inv) % p for x in combo]
        pivots.append((lead, v, combo))
    raise ValueError("subset is linearly independent; no kernel vector exists")


def int_subset_kernel_vector(m: SignMatrix, subset) -> FpVector:
    """Primitive integer kernel vector supported on a Q-dependent subset."""
    dense = m.dense()
    cols = [[Fraction(int(x)) for x in dense[:, j]] for j in subset]
    r = len(cols)
    pivots = []
    for idx in range(r):
        v = list(cols[idx])
        combo = [Fraction(0)] * r
        combo[idx] = Fraction(1)
        for pivot_row, pcol, pcombo in pivots:
            f = v[pivot_row]
            if f:
                v = [x - f * y for x, y in zip(v, pcol)]
                combo = [x - f * y for x, y in zip(combo, pcombo)]
        lead = next((i for i, x in enumerate(v) if x), None)
        if lead is None:
            lcm = 1
            for c in combo:
                lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
            ints = [int(c * lcm) for c in combo]
            g = 0
            for x in ints:
                g = math.gcd(g, x)
            ints = [x // g for x in ints]
            entries = [0] * m.d
            for j, c in zip(subset, ints):
                entries[j] = c
            vec = FpVector(0, tuple(entries))
            _verify_kernel(m, vec)
            return vec
        inv = 1 / v[lead]
        v = [x * inv for x in v]
        combo = [x * inv for x in combo]
        pivots.append((lead, v, combo))
    raise ValueError("subset is linearly independent; no kernel vector exists")


def matvec(m: SignMatrix, vec: FpVector):
    """Exact M . vec (list of length n); modular when vec.p > 0."""
    if vec.dim != m.d:
        raise DimensionError(f"vector length {vec.dim} != column count {m.d}")
    dense = m.dense()
    out = []
    for i in range(m.n):
        acc = 0
        row = dense[i]
        for j in vec.support:
            acc += int(row[j]) * vec.entries[j]
        out.append(acc % vec.p if vec.p else acc)
    return out

def _verify_kernel(m: SignMatrix, vec: FpVector):
    if vec.is_zero():
        raise RuntimeError("kernel witness is the zero vector")
    if any(matvec(m, vec)):
        raise RuntimeError("kernel witness failed exact re-verification")


# -- public operations ---------------------------------------------------------


def rank(m: SignMatrix, fieldspec: FieldSpec) -> RankResult:
    """Exact rank with a greedy-leftmost maximal independent column set."""
    if m.d == 0 or m.n == 0:
        return RankResult(0, ColumnSelection(()), m.d)
    if fieldspec.is_prime_field:
        r, profile = _kernels.fp_rank_profile(residue_matrix(m, fieldspec.p), fieldspec.p)
    else:
        proxy = _q_proxy_prime(m.n)
        if proxy is not None:
            r, profile = _kernels.fp_rank_profile(residue_matrix(m, proxy), proxy)
        else:
            r, profile = _int_rank_profile(_int_cols(m))
    return RankResult(r, ColumnSelection(tuple(profile)), m.d - r)


def kernel_basis(m: SignMatrix, fieldspec: FieldSpec):
    """Basis of the right kernel; d - rank vectors, each exactly verified."""
    if m.d == 0:
        return []
    if fieldspec.is_prime_field:
        basis = _fp_kernel_basis(m, fieldspec.p)
    else:
        basis = _q_kernel_basis(m)
    for v in basis:
        _verify_kernel(m, v)
    return basis


def _fp_kernel_basis(m: SignMatrix, p: int):
    n, d = m.n, m.d
    rows = [[int(x) for x in row] for row in residue_matrix(m, p)] if n else []
    # reduced row echelon over F_p
    pivots = []  # (row index in echelon, pivot column)
    echelon = []
    for row in rows:
        v = list(row)
        for erow, pc in zip(echelon, pivots):
            f = v[pc]
            if f:
                v = [(x - f * y) % p for x, y in zip(v, erow)]
        lead = next((i for i, x in enumerate(v) if x), None)
        if lead is None:
            continue
        inv = pow(v[lead], p - 2, p)
        v = [(x * inv) % p for x in v]
        echelon.append(v)
        pivots.append(lead)
    # back-eliminate to RREF
    order = sorted(range(len(echelon)), key=lambda t: pivots[t])
    echelon = [echelon[t] for t in order]
    pivots = [pivots[t] for t in order]
    for t in range(len(echelon) - 1, -1, -1):
        for u in range(t):
            f = echelon[u][pivots[t]]
            if f:
                echelon[u] = [
                    (x - f * y) % p for x, y in zip(echelon[u], echelon[t])
                ]
    pivset = set(pivots)
    basis = []
    for j in range(d):
        if j in pivset:
            continue
        entries = [0] * d
        entries[j] = 1
        for t, pc in enumerate(pivots):
            entries[pc] = (-echelon[t][j]) % p
        basis.append(FpVector(p, tuple(entries)))
    return basis


def _q_kernel_basis(m: SignMatrix):
    n, d = m.n, m.d
    dense = m.dense()
    rows = [[Fraction(int(x)) for x in dense[i]] for i in range(n)]
    echelon = []
    pivots = []
    for row in rows:
        v = list(row)
        for erow, pc in zip(echelon, pivots):
            f = v[pc]
            if f:
                v = [x - f * y for x, y in zip(v, erow)]
        lead = next((i for i, x in enumerate(v) if x), None)
        if lead is None:
            continue
        inv = 1 / v[lead]
        v = [x * inv for x in v]
        echelon.append(v)
        pivots.append(lead)
    order = sorted(range(len(echelon)), key=lambda t: pivots[t])
    echelon = [echelon[t] for t in order]
    pivots = [pivots[t] for t in order]
    for t in range(len(echelon) - 1, -1, -1):
        for u in range(t):
            f = echelon[u][pivots[t]]
            if f:
                echelon[u] = [x - f * y for x, y in zip(echelon[u], echelon[t])]
    pivset = set(pivots)
    basis = []
    for j in range(d):
        if j in pivset:
            continue
        entries = [Fraction(0)] * d
        entries[j] = Fraction(1)
        for t, pc in enumerate(pivots):
            entries[pc] = -echelon[t][j]
        lcm = 1
        for x in entries:
            lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
        ints = [int(x * lcm) for x in entries]
        g = 0
        for x in ints:
            g = math.gcd(g, x)
        basis.append(FpVector(0, tuple(x // g for x in ints)))
    return basis


def spark(
    m: SignMatrix,
    fieldspec: FieldSpec,
    cap: Optional[int] = None,
    budget: Optional[int] = None,
) -> SparkResult:
    """Minimum support of a nonzero kernel vector, by increasing-size search.

    With cap given, stops after proving spark > cap (above_cap marker).  A
    budget bounds the number of subset extensions examined; exceeding it
    raises BudgetExceededError rather than approximating.
    """
    if cap is not None and cap > m.d:
        raise PreconditionError(f"cap {cap} exceeds column count {m.d}")
    if m.d == 0:
        return SparkResult(None, True, False, None)
    if m.n == 0:
        entries = [0] * m.d
        entries[0] = 1
        p = fieldspec.p if fieldspec.is_prime_field else 0
        return SparkResult(1, False, False, FpVector(p, tuple(entries)))
    rk = rank(m, fieldspec)
    if rk.rank == m.d:
        return SparkResult(None, True, False, None)
    hard_cap = rk.rank + 1 if cap is None else min(cap, rk.rank + 1)
    spent = 0
    for r in range(2, hard_cap + 1):
        status, nodes, founds = _spark_pass(m, fieldspec, r, budget, spent)
        spent += nodes
        if status == _kernels.DFS_BUDGET:
            raise BudgetExceededError(
                f"spark search exhausted budget {budget} at subset size {r}"
            )
        if founds:
            subset = founds[0]
            witness = _witness_for(m, fieldspec, subset)
            return SparkResult(len(subset), False, False, witness)
    if cap is not None and hard_cap == cap:
        return SparkResult(None, False, True, None)
    raise RuntimeError("search completed without finding a guaranteed dependency")


def _spark_pass(m, fieldspec, cap, budget, spent):
    if budget is not None and budget - spent <= 0:
        return _kernels.DFS_BUDGET, 0, []
    remaining = 0 if budget is None else budget - spent
    if fieldspec.is_prime_field:
        cols = residue_columns(m, fieldspec.p)
        return _kernels.spark_dfs(cols, fieldspec.p, cap, remaining, 1)
    proxy = _q_proxy_prime(m.n)
    if proxy is not None:
        cols = residue_columns(m, proxy)
        status, nodes, founds = _kernels.spark_dfs(cols, proxy, cap, remaining, 1)
        # proxy prime exceeds the Hadamard bound for n <= 26, so modular
        # dependency/independence verdicts coincide with rational ones here
        return status, nodes, founds
    return _int_spark_dfs(_int_cols(m), cap, remaining, 1)


def _witness_for(m, fieldspec, subset) -> FpVector:
    if fieldspec.is_prime_field:
        return fp_subset_kernel_vector(m, subset, fieldspec.p)
    return int_subset_kernel_vector(m, subset)


def is_s_robust(m: SignMatrix, s: int, fieldspec: FieldSpec):
    """True iff every s columns are independent; False ships a verified witness.

    Decided via spark(m) > s.  The witness is a nonzero kernel vector with
    support of size at most s (exact re-multiplication checked).
    """
    if not (1 <= s <= m.d):
        raise PreconditionError(f"s must satisfy 1 <= s <= d, got s={s}, d={m.d}")
    res = spark(m, fieldspec, cap=s)
    if res.infinite or res.above_cap:
        return True, None
    return False, res.witness


def max_rank_deficiency(
    m: SignMatrix, s: int, samples: int, seed: SeedSpec, fieldspec: FieldSpec = None
) -> int:
    """Max of (s - rank) over `samples` random s-subsets of columns.

    An empirical statistic, not a certificate over all subsets.
    """
    if s > m.d:
        raise PreconditionError(f"s={s} exceeds column count {m.d}")
    if s == 0:
        return 0
    fieldspec = fieldspec or FieldSpec.prime()
    rng = seed.generator()
    worst = 0
    if fieldspec.is_prime_field:
        p = fieldspec.p
        res = residue_matrix(m, p)
        for _ in range(samples):
            idx = np.sort(rng.choice(m.d, size=s, replace=False))
            r, _ = _kernels.fp_rank_profile(np.ascontiguousarray(res[:, idx]), p)
            worst = max(worst, s - r)
    else:
        from .matrices import select_columns

        for _ in range(samples):
            idx = np.sort(rng.choice(m.d, size=s, replace=False))
            sub = select_columns(m, ColumnSelection(tuple(int(i) for i in idx)))
            worst = max(worst, s - rank(sub, fieldspec).rank)
    return worst
