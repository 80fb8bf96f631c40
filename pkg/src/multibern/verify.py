"""Independent checks on a computed B_k.

* an exact desk-scale oracle from the binomial recurrence,
* the magnitude test |B_k| (2 pi)^k / (2 k!) = zeta(k) in (1, zeta(4)],
* spot checks against fresh primes not used in the reconstruction.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from gmpy2 import mpz

from .bernmod import bern_mod_p_basic, kummer_reduce
from .bounds import compute_bounds
from .primesieve import sieve_range, sieve_upto
from .reconstruct import BernoulliRational

__all__ = [
    "VerificationReport",
    "ORACLE_LIMIT",
    "ZETA4_BOUND",
    "oracle_bernoulli",
    "oracle_table",
    "magnitude_check",
    "magnitude_ok",
    "spot_primes",
    "spot_check",
    "verify",
]

ORACLE_LIMIT = 4000
ZETA4_BOUND = 1.0824  # zeta(4) = pi^4/90 = 1.08232...

_lock = threading.Lock()
_cache: dict = {"n": -1, "L": mpz(1), "A": []}


@dataclass
class VerificationReport:
    ratio: float
    magnitude_ok: bool
    spot_primes: list[int] = field(default_factory=list)
    spot_ok: bool = False
    oracle_ok: bool | None = None

    @property
    def ok(self) -> bool:
        return self.magnitude_ok and self.spot_ok and self.oracle_ok is not False


def _scaled_table(n: int) -> tuple[mpz, list[mpz]]:
    """L and A_0..A_n with B_j = A_j / L, L the product of primes <= n + 1.

    Every denominator of B_j (j <= n) divides L, so the recurrence
    (m+1) B_m = -sum_{j<m} C(m+1, j) B_j runs in integers.
    """
    L = mpz(math.prod(sieve_upto(n + 1).primes.tolist()))
    A = [L, -L // 2]
    row = [mpz(1), mpz(2), mpz(1)]  # C(2, j)
    for m in range(2, n + 1):
        row = [mpz(1)] + [row[j - 1] + row[j] for j in range(1, len(row))] + [mpz(1)]
        if m % 2:
            A.append(mpz(0))
            continue
        s = (m + 1) * A[1]
        for j in range(0, m, 2):
            s += row[j] * A[j]
        q, r = divmod(-s, m + 1)
        assert r == 0
        A.append(q)
    return L, A[: n + 1]


def oracle_table(n: int) -> list[Fraction]:
    """B_0..B_n as Fractions (cached, grows on demand)."""
    if n > ORACLE_LIMIT:
        raise ValueError(f"oracle limited to k <= {ORACLE_LIMIT}, got {n}")
    with _lock:
        if _cache["n"] < n:
            L, A = _scaled_table(max(n, 2 * _cache["n"], 64))
            _cache.update(n=len(A) - 1, L=L, A=A)
        L, A = _cache["L"], _cache["A"]
    return [Fraction(int(a), int(L)) for a in A[: n + 1]]


def oracle_bernoulli(k: int) -> BernoulliRational:
    if k < 0:
        raise ValueError("k must be nonnegative")
    return BernoulliRational.from_fraction(oracle_table(k)[k])


def magnitude_check(result: BernoulliRational, k: int) -> mpmath.mpf:
    """rho = |B_k| (2 pi)^k / (2 k!), which equals zeta(k) for a correct B_k.

    Evaluated with k + 64 bits so that rho - 1 ~ 2^-k stays visible.
    """
    if k < 4 or k % 2:
        raise ValueError(f"k must be even and >= 4, got {k}")
    with mpmath.workprec(max(96, k + 64)):
        b = mpmath.mpf(abs(result.numerator)) / result.denominator
        return b * (2 * mpmath.pi) ** k / (2 * mpmath.mpf(math.factorial(k)))


def magnitude_ok(rho) -> bool:
    return 1 < rho <= ZETA4_BOUND


def spot_primes(k: int, X: int, count: int) -> list[int]:
    """The ``count`` smallest primes above X with p - 1 not dividing k."""
    out: list[int] = []
    lo, width = X + 1, max(1024, 64 * count)
    while len(out) < count:
        for p in sieve_range(lo, lo + width - 1).tolist():
            if k % (p - 1):
                out.append(p)
                if len(out) == count:
                    break
        lo += width
    return out


def _reduce(result: BernoulliRational, p: int) -> int:
    return result.numerator % p * pow(result.denominator % p, -1, p) % p


def _residue(k: int, p: int) -> int:
    m, scale = kummer_reduce(k, p)
    return bern_mod_p_basic(m, p) * scale % p


def spot_check(result: BernoulliRational, k: int, count: int = 3, X: int | None = None) -> bool:
    """Compare result mod p with the basic-loop residue for fresh primes above X."""
    if X is None:
        X = compute_bounds(k)[0].X
    return all(_reduce(result, p) == _residue(k, p) for p in spot_primes(k, X, count))


def verify(
    result: BernoulliRational, k: int, count: int = 3, X: int | None = None
) -> VerificationReport:
    if X is None:
        X = compute_bounds(k)[0].X
    rho = magnitude_check(result, k)
    primes = spot_primes(k, X, count)
    spot = all(_reduce(result, p) == _residue(k, p) for p in primes)
    oracle = None
    if k <= ORACLE_LIMIT:
        oracle = oracle_bernoulli(k) == result
    return VerificationReport(
        ratio=float(rho),
        magnitude_ok=magnitude_ok(rho),
        spot_primes=primes,
        spot_ok=spot,
        oracle_ok=oracle,
    )
