"""Segmented sieve of Eratosthenes over odd numbers."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["PrimeList", "sieve_upto", "sieve_range", "next_prime", "PrimeListExhausted"]

SEGMENT = 1 << 18  # odd candidates per segment


class PrimeListExhausted(LookupError):
    """No prime above the requested value inside the sieved range."""


@dataclass(frozen=True)
class PrimeList:
    limit: int
    primes: np.ndarray  # strictly increasing, int64

    def __len__(self) -> int:
        return len(self.primes)

    def __iter__(self):
        return iter(self.primes.tolist())

    def index_above(self, p: int) -> int:
        """Index of the first prime strictly greater than ``p``."""
        return int(np.searchsorted(self.primes, p, side="right"))


def _small_primes(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    for q in range(2, math.isqrt(n) + 1):
        if flags[q]:
            flags[q * q :: q] = False
    return np.flatnonzero(flags).astype(np.int64)


def sieve_range(lo: int, hi: int, segment: int = SEGMENT) -> np.ndarray:
    """All primes ``p`` with ``lo <= p <= hi``."""
    lo = max(lo, 2)
    if hi < lo:
        return np.zeros(0, dtype=np.int64)
    base = _small_primes(math.isqrt(hi))
    chunks = []
    if lo <= 2 <= hi:
        chunks.append(np.array([2], dtype=np.int64))
    start = max(lo, 3) | 1
    odd_base = base[base > 2]
    while start <= hi:
        # segment covers odd numbers start, start+2, ..., start+2*(count-1)
        count = min(segment, (hi - start) // 2 + 1)
        stop = start + 2 * count
        flags = np.ones(count, dtype=bool)
        for q in odd_base.tolist():
            qq = q * q
            if qq >= stop:
                break
            first = max(qq, -(-start // q) * q)
            if first % 2 == 0:
                first += q
            if first < stop:
                flags[(first - start) // 2 :: q] = False
        if start == 1:
            flags[0] = False
        chunks.append(start + 2 * np.flatnonzero(flags).astype(np.int64))
        start = stop
    if not chunks:
        return np.zeros(0, dtype=np.int64)
    return np.concatenate(chunks)


def sieve_upto(limit: int) -> PrimeList:
    """All primes ``<= limit``."""
    return PrimeList(limit=limit, primes=sieve_range(2, limit))


def next_prime(p: int, plist: PrimeList) -> int:
    i = plist.index_above(p)
    if i >= len(plist.primes):
        raise PrimeListExhausted(f"no prime above {p} within limit {plist.limit}")
    return int(plist.primes[i])
