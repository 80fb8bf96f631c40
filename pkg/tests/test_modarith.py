import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from multibern.modarith import (
    distinct_prime_factors,
    find_generator,
    is_prime,
    mod_inv,
    mod_pow,
    mont_new,
    order_of_two,
)
from multibern.primesieve import sieve_upto

SMALL_PRIMES = [p for p in sieve_upto(10_000).primes.tolist() if p >= 5]


def test_mont_new_defining_congruence():
    ctx = mont_new(5)
    assert ctx.pinv * 5 % (1 << ctx.w) == (1 << ctx.w) - 1


def test_mont_roundtrip_small():
    ctx = mont_new(7)
    assert ctx.from_mont(ctx.to_mont(3)) == 3


def test_largest_record_prime_fits_64_bit_words():
    ctx = mont_new(1558322063)
    assert ctx.w == 64
    assert ctx.pinv * ctx.p % (1 << 64) == (1 << 64) - 1
    assert ctx.from_mont(ctx.mul(ctx.to_mont(123456789), ctx.to_mont(987654321))) == (
        123456789 * 987654321 % 1558322063
    )


@pytest.mark.parametrize("p", [2, 3, 4, 9 + 1, 1 << 30])
def test_mont_new_rejects(p):
    with pytest.raises(ValueError):
        mont_new(p, 32)


def test_mont_new_headroom_64():
    with pytest.raises(ValueError):
        mont_new((1 << 62) + 1, 64)


@pytest.mark.parametrize("base, exp, p, expected", [(2, 10, 11, 1), (3, 0, 7, 1), (2, 5, 31, 1)])
def test_mod_pow_examples(base, exp, p, expected):
    prod = 1
    for _ in range(exp):
        prod = prod * base % p
    assert prod == expected
    assert mod_pow(base, exp, mont_new(p)) == expected


@pytest.mark.parametrize("a, p, expected", [(2, 7, 4), (1, 101, 1), (6, 5, 1)])
def test_mod_inv_examples(a, p, expected):
    assert mod_inv(a, p) == expected


def test_mod_inv_zero():
    with pytest.raises(ZeroDivisionError):
        mod_inv(0, 7)
    with pytest.raises(ZeroDivisionError):
        mod_inv(14, 7)


@pytest.mark.parametrize("p, g", [(5, 2), (7, 3), (11, 2)])
def test_find_generator_examples(p, g):
    assert find_generator(p, distinct_prime_factors(p - 1)) == g


@pytest.mark.parametrize("p, n", [(7, 3), (17, 8), (5, 4)])
def test_order_of_two_examples(p, n):
    assert order_of_two(p, distinct_prime_factors(p - 1)) == n


def _brute_order(a, p):
    x, n = a % p, 1
    while x != 1:
        x = x * a % p
        n += 1
    return n


def test_generator_has_full_order_below_1e4():
    for p in SMALL_PRIMES:
        g = find_generator(p)
        assert _brute_order(g, p) == p - 1, p
        # smallest such root
        assert all(_brute_order(h, p) < p - 1 for h in range(2, g))


def test_order_of_two_matches_brute_force_below_1e4():
    for p in SMALL_PRIMES:
        n = order_of_two(p)
        assert n == _brute_order(2, p)
        assert (p - 1) % n == 0
        for q in distinct_prime_factors(n):
            assert pow(2, n // q, p) != 1


@pytest.mark.parametrize("w", [32, 64])
def test_mont_mul_matches_schoolbook(w):
    rng = random.Random(w)
    limit = 1 << (w - 2)
    primes = [p for p in SMALL_PRIMES[-50:]] + [1000003, 999999937]
    if w == 64:
        primes += [1558322063, (1 << 61) - 1]
    for _ in range(10_000):
        p = rng.choice(primes)
        if p >= limit:
            continue
        ctx = mont_new(p, w)
        a, b = rng.randrange(p), rng.randrange(p)
        assert ctx.from_mont(ctx.mul(ctx.to_mont(a), ctx.to_mont(b))) == a * b % p


@given(st.sampled_from(SMALL_PRIMES + [1000003, 2147483647]), st.integers(min_value=0), st.sampled_from([32, 64]))
def test_mont_roundtrip_property(p, a, w):
    if p >= 1 << (w - 2):
        w = 64
    ctx = mont_new(p, w)
    a %= p
    assert ctx.from_mont(ctx.to_mont(a)) == a


@given(st.sampled_from(SMALL_PRIMES), st.integers(min_value=0, max_value=1 << 64))
def test_quotient_via_reciprocal(p, x):
    x %= 1 << 64
    assert mont_new(p).quotient(x) == x // p


def test_is_prime_matches_sieve():
    flags = set(sieve_upto(20_000).primes.tolist())
    assert [n for n in range(20_001) if is_prime(n)] == sorted(flags)
