"""Single-word modular arithmetic: Montgomery form, powering, inversion,
primitive roots and the multiplicative order of 2.

Everything here is plain Python integer code and doubles as the reference
implementation for the compiled kernels in :mod:`multibern._kernels`.
"""
from __future__ import annotations

from dataclasses import dataclass

__all__ = [
    "MontgomeryContext",
    "mont_new",
    "mod_pow",
    "mod_inv",
    "find_generator",
    "order_of_two",
    "distinct_prime_factors",
    "is_prime",
]


@dataclass(frozen=True)
class MontgomeryContext:
    """Precomputed constants for arithmetic modulo an odd prime ``p``.

    ``pinv`` is ``-p^{-1} mod 2^w``, ``r2`` is ``2^{2w} mod p`` and ``recip``
    is ``floor(2^64 / p)``, the fixed-point reciprocal used for quotient
    extraction.
    """

    p: int
    w: int
    r2: int
    pinv: int
    recip: int

    @property
    def mask(self) -> int:
        return (1 << self.w) - 1

    @property
    def one(self) -> int:
        """Montgomery image of 1."""
        return (1 << self.w) % self.p

    def redc(self, t: int) -> int:
        # t < p * 2^w
        m = ((t & self.mask) * self.pinv) & self.mask
        u = (t + m * self.p) >> self.w
        return u - self.p if u >= self.p else u

    def mul(self, a: int, b: int) -> int:
        return self.redc(a * b)

    def to_mont(self, a: int) -> int:
        return self.redc((a % self.p) * self.r2)

    def from_mont(self, a: int) -> int:
        return self.redc(a)

    def quotient(self, x: int) -> int:
        """``floor(x / p)`` for ``0 <= x < 2^64`` via the reciprocal."""
        q = (x * self.recip) >> 64
        if x - q * self.p >= self.p:
            q += 1
        return q


def default_word_width(p: int) -> int:
    return 32 if p < 1 << 30 else 64


def mont_new(p: int, w: int | None = None) -> MontgomeryContext:
    """Build a Montgomery context for the odd prime ``p``.

    The word width defaults to 32 bits when ``p < 2^30`` and 64 bits otherwise;
    either way ``p < 2^(w-2)`` must hold so that delayed-reduction sums have
    headroom.
    """
    if w is None:
        w = default_word_width(p)
    if w not in (32, 64):
        raise ValueError(f"unsupported word width {w}")
    if p < 5:
        raise ValueError(f"modulus must be >= 5, got {p}")
    if p % 2 == 0:
        raise ValueError(f"modulus must be odd, got {p}")
    if p >= 1 << (w - 2):
        raise ValueError(f"modulus {p} too large for {w}-bit words (need p < 2^{w - 2})")
    pinv = (-pow(p, -1, 1 << w)) % (1 << w)
    return MontgomeryContext(
        p=p,
        w=w,
        r2=pow(2, 2 * w, p),
        pinv=pinv,
        recip=(1 << 64) // p,
    )


def mod_pow(base: int, exp: int, ctx: MontgomeryContext) -> int:
    """``base^exp mod p`` by left-to-right binary powering in Montgomery form."""
    if exp < 0:
        raise ValueError("exponent must be nonnegative")
    b = ctx.to_mont(base)
    acc = ctx.one
    for bit in bin(exp)[2:] if exp else "":
        acc = ctx.mul(acc, acc)
        if bit == "1":
            acc = ctx.mul(acc, b)
    return ctx.from_mont(acc)


def mod_inv(a: int, p: int) -> int:
    """Inverse of ``a`` modulo ``p`` by the extended Euclidean algorithm."""
    a %= p
    if a == 0:
        raise ZeroDivisionError(f"0 is not invertible modulo {p}")
    r0, r1 = p, a
    s0, s1 = 0, 1
    while r1:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if r0 != 1:
        raise ZeroDivisionError(f"{a} is not invertible modulo {p}")
    return s0 % p


def distinct_prime_factors(n: int) -> list[int]:
    """Distinct prime divisors of ``n`` by trial division (word-sized ``n``)."""
    out = []
    if n % 2 == 0:
        out.append(2)
        while n % 2 == 0:
            n //= 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 2
    if n > 1:
        out.append(n)
    return out


def is_prime(n: int) -> bool:
    """Deterministic trial-division primality test; fine for word-sized ``n``."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def _context(p: int) -> MontgomeryContext:
    return mont_new(p, 64 if p >= 1 << 30 else 32)


def find_generator(p: int, factors_of_p_minus_1: list[int] | None = None) -> int:
    """Smallest primitive root modulo the odd prime ``p``."""
    if p == 2:
        return 1
    if p == 3:
        return 2
    if factors_of_p_minus_1 is None:
        factors_of_p_minus_1 = distinct_prime_factors(p - 1)
    ctx = _context(p)
    exps = [(p - 1) // q for q in factors_of_p_minus_1]
    g = 2
    while True:
        if all(mod_pow(g, e, ctx) != 1 for e in exps):
            return g
        g += 1


def order_of_two(p: int, factors_of_p_minus_1: list[int] | None = None) -> int:
    """Multiplicative order of 2 modulo the odd prime ``p``.

    Starts from ``p - 1`` and strips each prime factor while the power of 2
    stays 1.
    """
    if factors_of_p_minus_1 is None:
        factors_of_p_minus_1 = distinct_prime_factors(p - 1)
    ctx = _context(p)
    n = p - 1
    for q in factors_of_p_minus_1:
        while n % q == 0 and mod_pow(2, n // q, ctx) == 1:
            n //= q
    return n
