"""Compiled per-prime kernels.

All hot arithmetic is done on ``uint64`` scalars; numba silently promotes
mixed signed/unsigned expressions to float64, so every constant is wrapped.
Kernels release the GIL and can be driven from a thread pool.

Supported moduli: odd primes ``5 <= p < 2^32``.  Montgomery words are 32 bits
for ``p < 2^30`` and 64 bits otherwise (``w`` may also be forced to 64 for
testing).
"""
from __future__ import annotations

import numpy as np
from numba import njit

KERNEL_PRIME_LIMIT = 1 << 32
TABLE_BITS = 8
WORD_BITS = 64
NTABLES = WORD_BITS // TABLE_BITS
DEFAULT_BLOCK_BITS = 4096

U0 = np.uint64(0)
U1 = np.uint64(1)
U32 = np.uint64(32)
U64MAX = np.uint64(0xFFFFFFFFFFFFFFFF)
M32 = np.uint64(0xFFFFFFFF)

_jit = njit(nogil=True, cache=True)


# --------------------------------------------------------------------------
# word arithmetic


@_jit
def mul_wide(a, b):
    """Full 128-bit product of two uint64 as (hi, lo)."""
    a0 = a & M32
    a1 = a >> U32
    b0 = b & M32
    b1 = b >> U32
    p00 = a0 * b0
    p01 = a0 * b1
    p10 = a1 * b0
    p11 = a1 * b1
    mid = (p00 >> U32) + (p01 & M32) + (p10 & M32)
    lo = (p00 & M32) | (mid << U32)
    hi = p11 + (p01 >> U32) + (p10 >> U32) + (mid >> U32)
    return hi, lo


@_jit
def mont_mul(a, b, p, pinv, w):
    """Montgomery product a*b/2^w mod p for a, b < p."""
    if w == 32:
        t = a * b
        m = ((t & M32) * pinv) & M32
        u = (t + m * p) >> U32
    else:
        hi, lo = mul_wide(a, b)
        m = lo * pinv
        mh, ml = mul_wide(m, p)
        carry = U1 if lo != U0 else U0
        u = hi + mh + carry
    if u >= p:
        u -= p
    return u


@_jit
def to_mont(a, p, pinv, w, r2):
    return mont_mul(a % p, r2, p, pinv, w)


@_jit
def from_mont(a, p, pinv, w):
    return mont_mul(a, U1, p, pinv, w)


@_jit
def mont_pow(base_m, e, p, pinv, w, one_m):
    """base_m^e in Montgomery form; e is a nonnegative int64."""
    acc = one_m
    b = base_m
    while e > 0:
        if e & 1:
            acc = mont_mul(acc, b, p, pinv, w)
        b = mont_mul(b, b, p, pinv, w)
        e >>= 1
    return acc


@_jit
def quotient(x, p, recip):
    """(floor(x/p), x mod p) for x < 2^64 using recip = floor(2^64/p)."""
    q, _ = mul_wide(x, recip)
    r = x - q * p
    if r >= p:
        q += U1
        r -= p
    return q, r


@_jit
def expand_step(u, p, rh, rl):
    """One 32-bit digit of u/p: returns (floor(u*2^32/p), u*2^32 mod p).

    rh, rl are the high and low halves of floor(2^64/p); requires u < p < 2^32.
    """
    q = u * rh + ((u * rl) >> U32)
    r = (u << U32) - q * p
    if r >= p:
        q += U1
        r -= p
    return q, r


@_jit
def plain_pow(b, e, p):
    """b^e mod p for p < 2^32 without Montgomery form."""
    b = np.uint64(b) % p
    acc = U1
    while e > 0:
        if e & 1:
            acc = (acc * b) % p
        b = (b * b) % p
        e >>= 1
    return acc


@_jit
def inv_mod(a, p):
    """Inverse of a mod p by extended Euclid (int64 arguments)."""
    r0, r1 = p, a % p
    s0, s1 = 0, 1
    while r1 != 0:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    return s0 % p


# --------------------------------------------------------------------------
# per-prime setup


@_jit
def factor_distinct(n, out):
    """Write the distinct prime factors of n into out; return their count."""
    c = 0
    if n % 2 == 0:
        out[c] = 2
        c += 1
        while n % 2 == 0:
            n //= 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            out[c] = d
            c += 1
            while n % d == 0:
                n //= d
        d += 2
    if n > 1:
        out[c] = n
        c += 1
    return c


@_jit
def generator_and_order(p):
    """(smallest primitive root, multiplicative order of 2) modulo p."""
    fac = np.empty(16, dtype=np.int64)
    nf = factor_distinct(p - 1, fac)
    up = np.uint64(p)
    g = 2
    while True:
        ok = True
        for i in range(nf):
            if plain_pow(g, (p - 1) // fac[i], up) == U1:
                ok = False
                break
        if ok:
            break
        g += 1
    n = p - 1
    for i in range(nf):
        q = fac[i]
        while n % q == 0 and plain_pow(2, n // q, up) == U1:
            n //= q
    return g, n


# --------------------------------------------------------------------------
# expansion of s/p


@_jit
def reciprocal(p):
    """floor(2^64 / p) for odd p."""
    # p odd, so p does not divide 2^64 and floor((2^64 - 1)/p) = floor(2^64/p)
    return U64MAX // np.uint64(p)


@_jit
def expansion_words(s, p, nwords):
    """First nwords 64-bit words of the binary expansion of s/p (MSB first)."""
    up = np.uint64(p)
    recip = reciprocal(p)
    rh = recip >> U32
    rl = recip & M32
    out = np.empty(nwords, dtype=np.uint64)
    u = np.uint64(s)
    for t in range(nwords):
        q1, u = expand_step(u, up, rh, rl)
        q2, u = expand_step(u, up, rh, rl)
        out[t] = (q1 << U32) | q2
    return out


# --------------------------------------------------------------------------
# B_k mod p: basic loop (c = g)


@_jit
def basic_sum(k, p, g, w, pinv, r2):
    """Sum over i = 1..(p-1)/2 of g^{i(k-1)} h_g(g^i), returned as a plain residue.

    Accumulates (u - q) * Y with q = floor(gX/p) exactly as the loop in the
    basic algorithm; the caller applies the 2k/(1 - g^k) factor.
    """
    up = np.uint64(p)
    recip = reciprocal(p)
    ug = np.uint64(g)
    one_m = to_mont(U1, up, pinv, w, r2)
    r_m = mont_pow(to_mont(ug, up, pinv, w, r2), k - 1, up, pinv, w, one_m)
    # (g - 1)/2 mod p
    inv2 = (up + U1) >> U1
    u = ((ug - U1) * inv2) % up
    S = U0
    X = U1
    Y_m = r_m
    half = (p - 1) // 2
    for _ in range(half):
        q, Xn = quotient(ug * X, up, recip)
        d = u + up - q if u < q else u - q
        if d >= up:
            d -= up
        S += mont_mul(d, Y_m, up, pinv, w)
        if S >= up:
            S -= up
        X = Xn
        Y_m = mont_mul(Y_m, r_m, up, pinv, w)
    return S


# --------------------------------------------------------------------------
# B_k mod p: fast path (c = 1/2)


@_jit
def _reduce_tables(T, up):
    for v in range(T.shape[0]):
        for s in range(T.shape[1]):
            T[v, s] %= up


@_jit
def _words_into_tables(T, buf, u, wt, nwords, up, rh, rl, r64_m, pinv, w, pending, capacity):
    """Feed nwords 64-bit words of the expansion u/p into the tables.

    Each word adds the running weight wt to one entry of each of the eight
    tables (indexed by the word's bytes), then wt picks up a factor r^64.
    Tables are reduced only when the next block could overflow an entry.
    Returns the updated (u, wt, pending).
    """
    block_words = buf.shape[0]
    done = 0
    while done < nwords:
        nb = min(block_words, nwords - done)
        if pending + nb > capacity:
            _reduce_tables(T, up)
            pending = 0
        for t in range(nb):
            q1, u = expand_step(u, up, rh, rl)
            q2, u = expand_step(u, up, rh, rl)
            buf[t] = (q1 << U32) | q2
        for t in range(nb):
            word = buf[t]
            T[0, word >> np.uint64(56)] += wt
            T[1, (word >> np.uint64(48)) & np.uint64(255)] += wt
            T[2, (word >> np.uint64(40)) & np.uint64(255)] += wt
            T[3, (word >> np.uint64(32)) & np.uint64(255)] += wt
            T[4, (word >> np.uint64(24)) & np.uint64(255)] += wt
            T[5, (word >> np.uint64(16)) & np.uint64(255)] += wt
            T[6, (word >> np.uint64(8)) & np.uint64(255)] += wt
            T[7, word & np.uint64(255)] += wt
            wt = mont_mul(wt, r64_m, up, pinv, w)
        pending += nb
        done += nb
    return u, wt, pending


@_jit
def _direct_terms(x, wt, count, up, r_m, pinv, w):
    """sum_{j<count} wt r^j f(2^j x) by doubling; returns (sum, x', wt')."""
    acc = U0
    for _ in range(count):
        x2 = x + x
        if x2 < up:
            acc += wt
            x = x2
        else:
            acc += up - wt
            x = x2 - up
        if acc >= up:
            acc -= up
        wt = mont_mul(wt, r_m, up, pinv, w)
    return acc, x, wt


@_jit
def _combine_tables(T, r_m, one_m, up, pinv, w):
    """sum over tables v and bytes sigma of r^{8v} V_sigma T[v, sigma].

    V_sigma = sum_u r^u sigma_u is regrouped by bit position u:
    sum_u r^u (sum_sigma T_sigma - 2 sum_{sigma: bit u set} T_sigma).
    """
    _reduce_tables(T, up)
    total = U0
    rpow = one_m
    for v in range(NTABLES):
        tot = U0
        for sig in range(1 << TABLE_BITS):
            tot += T[v, sig]
        tot %= up
        for uu in range(TABLE_BITS):
            bit = U1 << np.uint64(TABLE_BITS - 1 - uu)
            col = U0
            for sig in range(1 << TABLE_BITS):
                if np.uint64(sig) & bit:
                    col += T[v, sig]
            col %= up
            coef = (tot + up + up - col - col) % up
            total += mont_mul(coef, rpow, up, pinv, w)
            if total >= up:
                total -= up
            rpow = mont_mul(rpow, r_m, up, pinv, w)
    return total


@_jit
def inner_sum(N, r, s, p, w, use_tables, block_words, capacity):
    """sum_{j<N} r^j f(2^j s) mod p as a plain residue."""
    pinv, r2 = mont_constants(p, w)
    up = np.uint64(p)
    one_m = to_mont(U1, up, pinv, w, r2)
    r_m = to_mont(np.uint64(r), up, pinv, w, r2)
    u = np.uint64(s)
    wt = one_m
    if not use_tables:
        acc, _, _ = _direct_terms(u, wt, N, up, r_m, pinv, w)
        return from_mont(acc, up, pinv, w)
    recip = reciprocal(p)
    T = np.zeros((NTABLES, 1 << TABLE_BITS), dtype=np.uint64)
    buf = np.empty(block_words, dtype=np.uint64)
    r64_m = mont_pow(r_m, WORD_BITS, up, pinv, w, one_m)
    u, wt, _ = _words_into_tables(
        T, buf, u, wt, N // WORD_BITS, up, recip >> U32, recip & M32, r64_m, pinv, w, 0, capacity
    )
    acc, _, _ = _direct_terms(u, wt, N % WORD_BITS, up, r_m, pinv, w)
    acc += _combine_tables(T, r_m, one_m, up, pinv, w)
    if acc >= up:
        acc -= up
    return from_mont(acc, up, pinv, w)


@_jit
def fast_sum(k, p, g, nprime, mprime, w, pinv, r2, use_tables, block_words, capacity):
    """Double sum over i < m', j < n' of (g^{k-1})^i (2^{k-1})^j f(g^i 2^j).

    Returned as a plain residue; the caller applies k / (2(2^{-k} - 1)).
    With ``use_tables`` the tables persist across the outer loop: the outer
    weight (g^{k-1})^i is folded into the value added, so tables are combined
    once per prime.
    """
    up = np.uint64(p)
    one_m = to_mont(U1, up, pinv, w, r2)
    two_m = to_mont(np.uint64(2), up, pinv, w, r2)
    r_m = mont_pow(two_m, k - 1, up, pinv, w, one_m)  # 2^{k-1}
    gk_m = mont_pow(to_mont(np.uint64(g), up, pinv, w, r2), k - 1, up, pinv, w, one_m)
    ug = np.uint64(g)

    total = U0  # Montgomery form
    weight = one_m  # (g^{k-1})^i
    s = U1  # g^i

    if not use_tables:
        for _ in range(mprime):
            acc, _, _ = _direct_terms(s, weight, nprime, up, r_m, pinv, w)
            total += acc
            if total >= up:
                total -= up
            weight = mont_mul(weight, gk_m, up, pinv, w)
            s = (s * ug) % up
        return from_mont(total, up, pinv, w)

    recip = reciprocal(p)
    rh = recip >> U32
    rl = recip & M32
    r64_m = mont_pow(r_m, WORD_BITS, up, pinv, w, one_m)
    T = np.zeros((NTABLES, 1 << TABLE_BITS), dtype=np.uint64)
    buf = np.empty(block_words, dtype=np.uint64)
    nwords = nprime // WORD_BITS
    tail = nprime % WORD_BITS
    pending = 0

    for _ in range(mprime):
        u, wt, pending = _words_into_tables(
            T, buf, s, weight, nwords, up, rh, rl, r64_m, pinv, w, pending, capacity
        )
        # last n' mod 64 terms; u = 2^{64*nwords} s mod p
        acc, _, _ = _direct_terms(u, wt, tail, up, r_m, pinv, w)
        total += acc
        if total >= up:
            total -= up
        weight = mont_mul(weight, gk_m, up, pinv, w)
        s = (s * ug) % up

    total += _combine_tables(T, r_m, one_m, up, pinv, w)
    if total >= up:
        total -= up
    return from_mont(total, up, pinv, w)


# --------------------------------------------------------------------------
# full residue


@_jit
def mont_constants(p, w):
    """(pinv, r2) for modulus p and word width w (32 or 64)."""
    up = np.uint64(p)
    # Newton iteration for p^{-1} mod 2^64: each step doubles correct bits
    inv = up
    for _ in range(6):
        inv = inv * (np.uint64(2) - up * inv)
    if w == 32:
        pinv = (U0 - inv) & M32
        r = (np.uint64(1) << U32) % up
    else:
        pinv = U0 - inv
        r = (U64MAX % up + U1) % up
    r2 = (r * r) % up
    return pinv, r2


@_jit
def bern_mod_p_kernel(k, p, w, mode, table_min_half, block_words, capacity):
    """B_k mod p for even k >= 2, prime 5 <= p < 2^32 with p - 1 not dividing k.

    mode: 0 = automatic (fast path, basic fallback), 1 = force basic path.
    The fast path uses tables when (p - 1)/2 >= table_min_half.
    Returns (residue, path) with path 0 = fast, 1 = basic.
    """
    pinv, r2 = mont_constants(p, w)
    up = np.uint64(p)
    # Kummer: B_k/k = B_m/m (mod p), m = k mod (p-1)
    m = k % (p - 1)
    scale = ((k % p) * inv_mod(m, p)) % p
    g, n = generator_and_order(p)
    path = 1
    if mode == 0 and m % n != 0:
        path = 0
    if path == 0:
        nprime = n // 2 if n % 2 == 0 else n
        mprime = ((p - 1) // 2) // nprime
        use_tables = (p - 1) // 2 >= table_min_half
        S = fast_sum(m, p, g, nprime, mprime, w, pinv, r2, use_tables, block_words, capacity)
        # m / (2 (2^{-m} - 1))
        t = plain_pow(inv_mod(2, p), m, up)
        den = (np.uint64(2) * ((t + up - U1) % up)) % up
        pref = (np.uint64(m) * np.uint64(inv_mod(np.int64(den), p))) % up
    else:
        S = basic_sum(m, p, g, w, pinv, r2)
        gm = plain_pow(g, m, up)
        den = (U1 + up - gm) % up
        pref = (np.uint64(2 * m) % up * np.uint64(inv_mod(np.int64(den), p))) % up
    res = (pref * S) % up
    res = (res * np.uint64(scale)) % up
    return np.int64(res), path


@_jit
def table_capacity(p):
    """Most unreduced additions a table entry (< p) can take without overflow."""
    return np.int64(U64MAX // np.uint64(p - 1) - U1)


@_jit
def bern_mod_p_batch(k, primes, out, paths, w_force, mode, table_min_half, block_words, capacity):
    """Fill out[i] with B_k mod primes[i]; w_force = 0 picks the word width per prime."""
    for i in range(len(primes)):
        p = primes[i]
        if w_force != 0:
            w = w_force
        else:
            w = 32 if p < (1 << 30) else 64
        cap = capacity
        if cap <= 0:
            cap = table_capacity(p)
        r, path = bern_mod_p_kernel(k, p, w, mode, table_min_half, block_words, cap)
        out[i] = r
        paths[i] = path
