"""Denominator of B_k and the bounds that size the multimodular computation.

``beta`` bounds the numerator (``|N_k| < 2^beta``), ``Y`` is the a-priori
limit for the prime list and ``X`` the tight limit actually used.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath

from ._bigint import tree_product
from .modarith import is_prime
from .primesieve import PrimeList, PrimeListExhausted, sieve_upto

__all__ = [
    "BoundSet",
    "denominator_vsc",
    "log2_int",
    "beta_bound",
    "a_priori_Y",
    "tight_X",
    "compute_bounds",
    "collection_primes",
]

BETA_SLACK = 2.0**-20  # per unit of k; keeps beta rounding upward


@dataclass(frozen=True)
class BoundSet:
    k: int
    Dk: int
    beta: int
    Y: int
    X: int
    log2Dk: float


def _check_even(k: int, least: int) -> None:
    if k < least or k % 2:
        raise ValueError(f"k must be even and >= {least}, got {k}")


def denominator_vsc(k: int) -> int:
    """Denominator of B_k: product of primes p with p - 1 dividing k."""
    _check_even(k, 2)
    divisors = []
    for d in range(1, math.isqrt(k) + 1):
        if k % d == 0:
            divisors.append(d)
            if d * d != k:
                divisors.append(k // d)
    return int(tree_product(sorted(d + 1 for d in divisors if is_prime(d + 1))))


def log2_int(n: int) -> float:
    """log2 of a positive integer without converting all of it to a float."""
    bl = n.bit_length()
    if bl <= 53:
        return math.log2(n)
    shift = bl - 53
    return shift + math.log2(n >> shift)


def beta_bound(k: int, Dk: int) -> int:
    _check_even(k, 4)
    val = (k + 0.5) * math.log2(k) - 4.094 * k + 2.470 + log2_int(Dk)
    return math.ceil(val + BETA_SLACK * k)


def a_priori_Y(k: int) -> int:
    """``max(37, ceil((k + 1/2) log2 k))`` evaluated exactly."""
    _check_even(k, 4)
    if k & (k - 1) == 0:
        e = k.bit_length() - 1
        val = k * e + (e + 1) // 2  # ceil(k*e + e/2), e integer
        return max(37, val)
    with mpmath.workprec(128):
        val = int(mpmath.ceil((k + mpmath.mpf(0.5)) * mpmath.log(k, 2)))
    return max(37, val)


class _Accumulator:
    """Floating product with an unbounded exponent.

    Uses a double mantissa when that carries enough bits, otherwise an
    mpmath float of the requested precision.
    """

    def __init__(self, mantissa_bits: int):
        self.extended = mantissa_bits > 53
        self.prec = mantissa_bits
        if self.extended:
            self.value = mpmath.mpf(1)
        else:
            self.mant, self.exp = 0.5, 1

    def mul(self, p: int) -> None:
        if self.extended:
            with mpmath.workprec(self.prec):
                self.value = self.value * p
        else:
            m, e = math.frexp(self.mant * p)
            self.mant, self.exp = m, self.exp + e

    def below_pow2(self, t: int) -> bool:
        """Whether the accumulated value is ``< 2^t``."""
        if self.extended:
            return self.value < mpmath.ldexp(1, t)
        # value = mant * 2^exp with mant in [0.5, 1)
        return self.exp <= t


def tight_X(k: int, beta: int, primes: PrimeList) -> tuple[int, int]:
    """Smallest prime X (in loop order) whose approximate product reaches 2^(beta+1).

    Returns ``(X, skipped)`` where ``skipped`` counts primes ``5 <= p <= X``
    left out because ``p - 1`` divides ``k``.
    """
    _check_even(k, 4)
    acc = _Accumulator(max(53, math.ceil(math.log2(max(primes.limit, 2))) + 1))
    p = 3
    skipped = 0
    idx = primes.index_above(p)
    plist = primes.primes
    while acc.below_pow2(beta + 1):
        if idx >= len(plist):
            raise PrimeListExhausted(
                f"prime list up to {primes.limit} exhausted while bounding k={k}"
            )
        p = int(plist[idx])
        idx += 1
        if k % (p - 1):
            acc.mul(p)
        else:
            skipped += 1
    return p, skipped


def compute_bounds(k: int, primes: PrimeList | None = None) -> tuple[BoundSet, PrimeList]:
    """All bounds for even ``k >= 4``; sieves up to ``Y`` unless ``primes`` is given."""
    _check_even(k, 4)
    Y = a_priori_Y(k)
    if primes is None:
        primes = sieve_upto(Y)
    Dk = denominator_vsc(k)
    beta = beta_bound(k, Dk)
    X, _ = tight_X(k, beta, primes)
    return BoundSet(k=k, Dk=Dk, beta=beta, Y=Y, X=X, log2Dk=log2_int(Dk)), primes


def collection_primes(k: int, X: int, primes: PrimeList) -> list[int]:
    """Primes ``5 <= p <= X`` with ``p - 1`` not dividing ``k``."""
    hi = int(primes.index_above(X))
    return [p for p in primes.primes[:hi].tolist() if p >= 5 and k % (p - 1)]
