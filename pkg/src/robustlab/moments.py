"""Second-moment quantities: P[sum = 0], the correlation ratio alpha(n, m),
exact/log-space moments of the zero-sum subset count, and the Chebyshev bound.

Everything in exact mode is integer or Fraction arithmetic; log mode uses
mpmath at 60 significant digits because alpha(s, m)^n spans hundreds of
orders of magnitude already at moderate sizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Optional

import mpmath
import numpy as np

from .errors import BudgetExceededError, PreconditionError

_MP_DPS = 60

#: exact-mode refusal threshold: bits of the largest intermediate integer
_EXACT_BITS_LIMIT = 4_000_000


@dataclass(frozen=True)
class ExactProb:
    """A dyadic rational numerator / 2^denominator_exponent.

    Used for probabilities and for probability-scaled counts (the latter may
    exceed 1).  log_value, when set, is the natural log as a float computed
    at high precision.
    """

    numerator: int
    denominator_exponent: int
    log_value: Optional[float] = None

    def value(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.denominator_exponent)

    def __float__(self):
        if self.numerator == 0:
            return 0.0
        with mpmath.workdps(30):
            return float(
                mpmath.mpf(self.numerator) / mpmath.power(2, self.denominator_exponent)
            )

    def log(self) -> float:
        """Natural log at high precision (requires a positive value)."""
        if self.numerator <= 0:
            raise ValueError("log of a nonpositive value")
        with mpmath.workdps(_MP_DPS):
            return float(
                mpmath.log(mpmath.mpf(self.numerator))
                - self.denominator_exponent * mpmath.log(2)
            )

    def render(self) -> str:
        if self.log_value is not None and self.numerator == 0:
            return f"exp({self.log_value:.12g})"
        return f"{self.numerator}/2^{self.denominator_exponent}"


@dataclass(frozen=True)
class AlphaTable:
    """alpha(n, m) for m = 0..n as exact Fractions."""

    n: int
    values: tuple

    def __post_init__(self):
        if self.n % 2:
            raise PreconditionError(f"alpha table requires even n, got {self.n}")

    @classmethod
    def build(cls, n: int) -> "AlphaTable":
        return cls(n, tuple(alpha_exact(n, m) for m in range(n + 1)))


@dataclass(frozen=True)
class MomentReport:
    n: int
    d: int
    s: int
    mode: str
    mean: ExactProb
    variance: Optional[Fraction]  # exact mode only
    var_over_mean_sq: float
    chebyshev_lower_bound: float


def prob_sum_zero(n: int) -> ExactProb:
    """P[xi_1 + ... + xi_n = 0] for i.i.d. signs: C(n, n/2) / 2^n, n even."""
    if n < 0 or n % 2:
        raise PreconditionError(
            f"sum of {n} signs is never zero; even nonnegative n required"
        )
    return ExactProb(comb(n, n // 2), n)


def alpha_exact(n: int, m: int) -> Fraction:
    """Correlation ratio of two zero-sum events sharing m of n signs.

    Closed form: 2^m * sum_k C(m,k) C(n-m, n/2-k)^2 / C(n, n/2)^2.
    """
    if n % 2:
        raise PreconditionError(f"alpha requires even n, got {n}")
    if not 0 <= m <= n:
        raise PreconditionError(f"m must lie in [0, n], got m={m}, n={n}")
    num = sum(comb(m, k) * comb(n - m, n // 2 - k) ** 2 for k in range(m + 1))
    return Fraction((1 << m) * num, comb(n, n // 2) ** 2)


_POP16 = np.array([bin(x).count("1") for x in range(1 << 16)], dtype=np.uint8)


def _popcount_u64(arr: np.ndarray) -> np.ndarray:
    m16 = np.uint64(0xFFFF)
    out = _POP16[arr & m16].astype(np.uint32)
    out += _POP16[(arr >> np.uint64(16)) & m16]
    out += _POP16[(arr >> np.uint64(32)) & m16]
    out += _POP16[(arr >> np.uint64(48)) & m16]
    return out


def alpha_bruteforce(n: int, m: int, budget_bits: int = 24) -> Fraction:
    """alpha(n, m) by full enumeration of the 2^(2n-m) sign assignments.

    Independent oracle for alpha_exact; refuses beyond the enumeration budget.
    """
    if n % 2:
        raise PreconditionError(f"alpha requires even n, got {n}")
    if not 0 <= m <= n:
        raise PreconditionError(f"m must lie in [0, n], got m={m}, n={n}")
    nbits = 2 * n - m
    if nbits > budget_bits:
        raise BudgetExceededError(
            f"enumeration needs 2^{nbits} assignments, budget is 2^{budget_bits}"
        )
    # bit layout: bits [0, n) are xi_1..xi_n; bits [n, 2n-m) are xi'_{m+1..n}
    total = 1 << nbits
    mask_first = np.uint64((1 << n) - 1)
    mask_shared = np.uint64((1 << m) - 1)
    mask_primed = np.uint64(((1 << (n - m)) - 1) << n)
    joint = 0
    half = n // 2
    chunk = 1 << min(nbits, 22)
    for start in range(0, total, chunk):
        x = np.arange(start, min(start + chunk, total), dtype=np.uint64)
        pc_first = _popcount_u64(x & mask_first)
        ev1 = pc_first == half
        pc_second = _popcount_u64(x & mask_shared) + _popcount_u64(x & mask_primed)
        joint += int(np.count_nonzero(ev1 & (pc_second == half)))
    p_joint = Fraction(joint, total)
    p_single = Fraction(comb(n, half), 1 << n)
    return p_joint / (p_single * p_single)


def hypergeometric_weight(s: int, d: int, m: int) -> Fraction:
    """C(s,m) C(d-s,s-m) / C(d,s); the overlap-size weight (sums to 1 over m)."""
    if not 0 <= m <= s <= d:
        raise PreconditionError(f"need 0 <= m <= s <= d, got m={m}, s={s}, d={d}")
    return Fraction(comb(s, m) * comb(d - s, s - m), comb(d, s))


def kl_divergence(q: float, p: float) -> float:
    """Binomial large-deviation rate D(q || p) for q, p in the open unit interval."""
    if not (0.0 < p < 1.0 and 0.0 < q < 1.0):
        raise PreconditionError(f"q and p must lie in (0, 1), got q={q}, p={p}")
    return q * math.log(q / p) + (1.0 - q) * math.log((1.0 - q) / (1.0 - p))


def moment_report(n: int, d: int, s: int, mode: str = "exact") -> MomentReport:
    """Mean and variance of the number of zero-sum s-column subsets.

    E X = C(d,s) * (2^-s C(s, s/2))^n; Var X is the hypergeometric-weighted
    sum of (alpha(s,m)^n - 1) terms.  Exact mode refuses (with instructions)
    when intermediates grow beyond the integer-size limit.
    """
    if s % 2:
        raise PreconditionError(
            f"s must be even (zero-sum of an odd sign count is impossible), got {s}"
        )
    if not 0 < s <= min(n, d):
        raise PreconditionError(f"need 0 < s <= min(n, d), got s={s}, n={n}, d={d}")
    if mode == "exact":
        bits_est = n * s + comb(d, s).bit_length()
        if bits_est > _EXACT_BITS_LIMIT:
            raise BudgetExceededError(
                "exact mode would exceed the integer-size limit; "
                "call with mode='log'"
            )
        mean_num = comb(d, s) * comb(s, s // 2) ** n
        mean = ExactProb(mean_num, n * s)
        ratio = Fraction(0)
        for m in range(s + 1):
            w = hypergeometric_weight(s, d, m)
            if w == 0:
                continue
            ratio += w * (alpha_exact(s, m) ** n - 1)
        mean_frac = mean.value()
        variance = mean_frac * mean_frac * ratio
        vr = float(ratio)
        return MomentReport(n, d, s, "exact", mean, variance, vr, _chebyshev(vr))
    if mode == "log":
        with mpmath.workdps(_MP_DPS):
            log_mean = (
                mpmath.log(mpmath.mpf(comb(d, s)))
                + n * mpmath.log(mpmath.mpf(comb(s, s // 2)))
                - n * s * mpmath.log(2)
            )
            ratio = mpmath.mpf(0)
            for m in range(s + 1):
                w = hypergeometric_weight(s, d, m)
                if w == 0:
                    continue
                a = alpha_exact(s, m)
                term = mpmath.expm1(
                    n * (mpmath.log(mpmath.mpf(a.numerator)) - mpmath.log(mpmath.mpf(a.denominator)))
                )
                ratio += mpmath.mpf(w.numerator) / w.denominator * term
            mean = ExactProb(0, 0, log_value=float(log_mean))
            vr = float(ratio)
        return MomentReport(n, d, s, "log", mean, None, vr, _chebyshev(vr))
    raise PreconditionError(f"mode must be 'exact' or 'log', got {mode!r}")


def _chebyshev(var_over_mean_sq: float) -> float:
    return min(1.0, max(0.0, 1.0 - var_over_mean_sq))
