"""B_k modulo a single word-sized prime.

Two evaluation routes are provided: the basic loop with c = g (a primitive
root), and the fast route with c = 1/2 in which the inner sums are driven by
the binary expansion of g^i / p and accumulated in byte-indexed tables.
The heavy lifting happens in :mod:`multibern._kernels`.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _kernels as K
from .modarith import distinct_prime_factors, find_generator, mod_inv, order_of_two

__all__ = [
    "ResiduePair",
    "FastPathPlan",
    "FastPathInapplicable",
    "make_plan",
    "bern_mod_p_basic",
    "kummer_reduce",
    "fraction_bits",
    "inner_sum_fast",
    "table_value",
    "table_values",
    "bern_mod_p_fast",
    "bern_mod_p",
    "bern_mod_primes",
    "h_c",
    "f_sign",
    "DEFAULT_TABLE_MIN_HALF",
]

# below this many terms per prime the table setup/combination costs more
# than it saves; see scripts/tune_tables.py
DEFAULT_TABLE_MIN_HALF = 1 << 12


class FastPathInapplicable(ArithmeticError):
    """2^k = 1 (mod p), so c = 1/2 cannot be used."""


@dataclass(frozen=True)
class ResiduePair:
    p: int
    rp: int


@dataclass(frozen=True)
class FastPathPlan:
    p: int
    n: int
    nprime: int
    mprime: int
    g: int
    table_bits: int = K.TABLE_BITS
    block_bits: int = K.DEFAULT_BLOCK_BITS


def _check_prime_range(p: int) -> None:
    if p < 5:
        raise ValueError(f"p must be >= 5, got {p}")
    if p >= K.KERNEL_PRIME_LIMIT:
        raise ValueError(f"p = {p} exceeds the kernel limit 2^32")


def _word_width(p: int, w: int | None) -> int:
    if w is None:
        return 32 if p < 1 << 30 else 64
    if w not in (32, 64) or (w == 32 and p >= 1 << 30):
        raise ValueError(f"word width {w} unusable for p = {p}")
    return w


def make_plan(p: int, block_bits: int = K.DEFAULT_BLOCK_BITS) -> FastPathPlan:
    factors = distinct_prime_factors(p - 1)
    n = order_of_two(p, factors)
    nprime = n // 2 if n % 2 == 0 else n
    return FastPathPlan(
        p=p,
        n=n,
        nprime=nprime,
        mprime=((p - 1) // 2) // nprime,
        g=find_generator(p, factors),
        block_bits=block_bits,
    )


def bern_mod_p_basic(k: int, p: int, w: int | None = None) -> int:
    """B_k mod p by the basic half-length loop; needs even k in [2, p - 3]."""
    _check_prime_range(p)
    if k % 2 or not 2 <= k <= p - 3:
        raise ValueError(f"need even k in [2, p-3], got k={k}, p={p}")
    r, _ = K.bern_mod_p_kernel(k, p, _word_width(p, w), 1, 0, 1, 1)
    return int(r)


def kummer_reduce(k: int, p: int) -> tuple[int, int]:
    """(m, scale) with m = k mod (p-1) and B_k = scale * B_m (mod p)."""
    if k % 2:
        raise ValueError(f"k must be even, got {k}")
    if k % (p - 1) == 0:
        raise ValueError(f"p - 1 divides k (p = {p} divides the denominator of B_{k})")
    m = k % (p - 1)
    if m == k:
        return k, 1
    return m, (k % p) * mod_inv(m, p) % p


def fraction_bits(s: int, p: int, count: int) -> list[int]:
    """First ``count`` binary digits of s/p."""
    if s % p == 0:
        raise ValueError("s must be nonzero mod p")
    _check_prime_range(p)
    words = K.expansion_words(s % p, p, -(-count // K.WORD_BITS))
    bits = []
    for word in words.tolist():
        bits.extend((word >> (63 - i)) & 1 for i in range(64))
    return bits[:count]


def inner_sum_fast(
    N: int,
    r: int,
    s: int,
    p: int,
    use_tables: bool = True,
    block_bits: int = K.DEFAULT_BLOCK_BITS,
    capacity: int | None = None,
    w: int | None = None,
) -> int:
    """sum_{0 <= j < N} r^j f(2^j s) mod p via the byte tables."""
    _check_prime_range(p)
    if s % p == 0:
        raise ValueError("s must be nonzero mod p")
    cap = K.table_capacity(p) if capacity is None else capacity
    return int(
        K.inner_sum(N, r % p, s % p, p, _word_width(p, w), use_tables, _block_words(block_bits), cap)
    )


def table_value(sigma: Sequence[int], r: int, p: int) -> int:
    """V_sigma = sum_u r^u sigma_u mod p for a sign vector sigma."""
    return sum(sg * pow(r, u, p) for u, sg in enumerate(sigma)) % p


def table_values(r: int, m: int, p: int) -> list[int]:
    """V_sigma for every m-bit digit; a set bit (MSB first) means sigma_u = -1."""
    return [
        table_value([-1 if (d >> (m - 1 - u)) & 1 else 1 for u in range(m)], r, p)
        for d in range(1 << m)
    ]


def _block_words(block_bits: int) -> int:
    if block_bits < K.WORD_BITS or block_bits % K.WORD_BITS:
        raise ValueError(f"block size must be a positive multiple of 64 bits, got {block_bits}")
    return block_bits // K.WORD_BITS


def bern_mod_p_fast(
    k: int,
    p: int,
    *,
    use_tables: bool | None = None,
    block_bits: int = K.DEFAULT_BLOCK_BITS,
    capacity: int | None = None,
    w: int | None = None,
) -> int:
    """B_k mod p with c = 1/2; needs even k in [2, p - 3] and 2^k != 1 (mod p)."""
    _check_prime_range(p)
    if k % 2 or not 2 <= k <= p - 3:
        raise ValueError(f"need even k in [2, p-3], got k={k}, p={p}")
    if pow(2, k, p) == 1:
        raise FastPathInapplicable(f"2^{k} = 1 (mod {p})")
    if use_tables is None:
        table_min = DEFAULT_TABLE_MIN_HALF
    else:
        table_min = 0 if use_tables else 1 << 62
    cap = K.table_capacity(p) if capacity is None else capacity
    r, path = K.bern_mod_p_kernel(k, p, _word_width(p, w), 0, table_min, _block_words(block_bits), cap)
    assert path == 0
    return int(r)


def bern_mod_p(k: int, p: int) -> ResiduePair:
    """B_k mod p for even k >= 2 and prime p >= 5 with p - 1 not dividing k."""
    _check_prime_range(p)
    m, scale = kummer_reduce(k, p)
    try:
        r = bern_mod_p_fast(m, p)
    except FastPathInapplicable:
        r = bern_mod_p_basic(m, p)
    return ResiduePair(p, r * scale % p)


def bern_mod_primes(
    k: int,
    primes: np.ndarray,
    *,
    basic_only: bool = False,
    table_min_half: int = DEFAULT_TABLE_MIN_HALF,
    block_bits: int = K.DEFAULT_BLOCK_BITS,
) -> tuple[np.ndarray, np.ndarray]:
    """Residues of B_k for a batch of collection primes in one compiled call.

    Returns ``(residues, paths)``; path 0 is the fast route, 1 the basic one.
    Releases the GIL for the duration of the batch.
    """
    primes = np.ascontiguousarray(primes, dtype=np.int64)
    out = np.empty(len(primes), dtype=np.int64)
    paths = np.empty(len(primes), dtype=np.int64)
    if len(primes):
        if primes.min() < 5 or primes.max() >= K.KERNEL_PRIME_LIMIT:
            raise ValueError("collection primes must lie in [5, 2^32)")
        if np.any(k % (primes - 1) == 0):
            raise ValueError("a prime with p - 1 | k was passed")
        K.bern_mod_p_batch(
            k, primes, out, paths, 0, 1 if basic_only else 0, table_min_half, _block_words(block_bits), 0
        )
    return out, paths


def h_c(c: Fraction | int, x: int, p: int) -> Fraction:
    """((x mod p) - c (x/c mod p)) / p + (c - 1)/2 as an exact rational."""
    c = Fraction(c)
    c_mod = c.numerator * pow(c.denominator, -1, p) % p
    x_over_c = x * pow(c_mod, -1, p) % p
    return Fraction(x % p - c * x_over_c, p) + (c - 1) / 2


def f_sign(x: int, p: int) -> int:
    """+1 if x mod p lies below p/2, -1 above (x must be nonzero mod p)."""
    x %= p
    if x == 0:
        raise ValueError("f is undefined at 0")
    return 1 if 2 * x < p else -1
