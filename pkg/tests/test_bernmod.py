import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import reduce_mod
from multibern import _kernels as K
from multibern.bernmod import (
    FastPathInapplicable,
    bern_mod_p,
    bern_mod_p_basic,
    bern_mod_p_fast,
    bern_mod_primes,
    f_sign,
    fraction_bits,
    h_c,
    inner_sum_fast,
    kummer_reduce,
    make_plan,
    table_value,
    table_values,
)
from multibern.modarith import find_generator, order_of_two
from multibern.primesieve import sieve_upto

PRIMES_100 = [p for p in sieve_upto(100).primes.tolist() if p >= 5]
PRIMES_256 = [p for p in sieve_upto(256).primes.tolist() if p >= 5]
PRIMES_1E4 = [p for p in sieve_upto(10_000).primes.tolist() if p >= 5]


def sum_form(k, p, c):
    """k/(1 - c^k) * sum_{x=1}^{p-1} x^{k-1} h_c(x) mod p, straight from the definition."""
    total = sum(pow(x, k - 1, p) * reduce_mod(h_c(c, x, p), p) for x in range(1, p))
    cm = reduce_mod(Fraction(c), p)
    return k * pow(1 - pow(cm, k, p), -1, p) * total % p


# ----------------------------------------------------------------- basic path


@pytest.mark.parametrize("k, p, expected", [(2, 5, 1), (4, 7, 3), (10, 13, 5)])
def test_basic_examples(k, p, expected, oracle):
    assert reduce_mod(oracle[k], p) == expected
    assert bern_mod_p_basic(k, p) == expected


@pytest.mark.parametrize("k, p", [(3, 11), (10, 11), (0, 11), (2, 3)])
def test_basic_rejects(k, p):
    with pytest.raises(ValueError):
        bern_mod_p_basic(k, p)


def test_defining_sum_matches_oracle(oracle):
    for p in PRIMES_100[:12]:
        g = find_generator(p)
        for k in range(2, p - 2, 2):
            expected = reduce_mod(oracle[k], p)
            assert sum_form(k, p, g) == expected
            if pow(2, k, p) != 1:
                assert sum_form(k, p, Fraction(1, 2)) == expected


# ----------------------------------------------------------------- identities


def test_h_antisymmetry():
    for p in PRIMES_100:
        for c in (find_generator(p), Fraction(1, 2)):
            for x in range(1, p):
                assert h_c(c, -x, p) == -h_c(c, x, p)


def test_h_half_is_minus_quarter_f():
    for p in PRIMES_100:
        for x in range(1, p):
            assert h_c(Fraction(1, 2), x, p) == Fraction(-f_sign(x, p), 4)


def test_bit_oracle():
    for p in PRIMES_256:
        for s in range(1, p):
            bits = fraction_bits(s, p, 24)
            for j, b in enumerate(bits):
                assert f_sign(pow(2, j, p) * s, p) == (-1) ** b


@pytest.mark.parametrize(
    "s, p, count, expected",
    [(1, 7, 6, [0, 0, 1, 0, 0, 1]), (1, 5, 4, [0, 0, 1, 1])],
)
def test_fraction_bits_examples(s, p, count, expected):
    assert fraction_bits(s, p, count) == expected


@given(st.sampled_from(PRIMES_1E4 + [1000003, 4294967291]), st.integers(min_value=1), st.integers(0, 300))
def test_fraction_bits_long_division(p, s, count):
    s = s % (p - 1) + 1
    assert fraction_bits(p - 1, p, 1) == [1]
    bits = fraction_bits(s, p, count)
    expect, u = [], s
    for _ in range(count):
        u *= 2
        expect.append(u // p)
        u %= p
    assert bits == expect


# ----------------------------------------------------------------- inner sums and tables


def brute_inner(N, r, s, p):
    return sum(pow(r, j, p) * f_sign(pow(2, j, p) * s, p) for j in range(N)) % p


@pytest.mark.parametrize("N, r, s, p, expected", [(3, 1, 1, 7, 1), (3, 2, 1, 7, 6)])
def test_inner_sum_examples(N, r, s, p, expected):
    assert brute_inner(N, r, s, p) == expected
    assert inner_sum_fast(N, r, s, p) == expected


def test_table_value_micro_case():
    assert table_value((+1, -1), 3, 7) == 5
    # sigma = (+1, -1) is the digit 0b01
    assert table_values(3, 2, 7)[0b01] == 5


@given(
    st.sampled_from([7, 257, 7681, 65521, 1000003, 1073741827]),
    st.integers(0, 2000),
    st.integers(min_value=0),
    st.integers(min_value=1),
    st.sampled_from([64, 128, 4096]),
    st.sampled_from([1, 3, None]),
)
def test_inner_sum_matches_brute_force(p, N, r, s, block, cap):
    r %= p
    s = s % (p - 1) + 1
    expected = brute_inner(N, r, s, p)
    assert inner_sum_fast(N, r, s, p, block_bits=block, capacity=cap) == expected
    assert inner_sum_fast(N, r, s, p, use_tables=False) == expected


def test_table_regrouping_equals_V_sigma_sum():
    """sum_sigma V_sigma T_sigma computed literally agrees with the kernel's grouping."""
    rng = random.Random(5)
    p = 65521
    for _ in range(20):
        r, s = rng.randrange(p), rng.randrange(1, p)
        N = 64 * rng.randrange(1, 20)
        # literal tables, one per byte position, no delayed reduction
        V = table_values(r, 8, p)
        bits = fraction_bits(s, p, N)
        T = [[0] * 256 for _ in range(8)]
        for t in range(N // 64):
            for v in range(8):
                byte = int("".join(map(str, bits[64 * t + 8 * v : 64 * t + 8 * v + 8])), 2)
                T[v][byte] += pow(r, 64 * t, p)
        literal = sum(pow(r, 8 * v, p) * V[sg] * T[v][sg] for v in range(8) for sg in range(256)) % p
        assert literal == inner_sum_fast(N, r, s, p)


def test_table_capacity_never_overflows():
    for p in [5, 65521, 1073741827, 4294967291]:
        cap = K.table_capacity(p)
        assert cap >= 1
        # an entry below p plus cap additions of at most p - 1 fits in 64 bits
        assert (p - 1) + cap * (p - 1) <= 2**64 - 1


# ----------------------------------------------------------------- Kummer


def test_kummer_examples(oracle):
    assert kummer_reduce(14, 5)[0] == 2
    assert reduce_mod(oracle[14], 5) == 2
    assert kummer_reduce(4, 7) == (4, 1)
    m, scale = kummer_reduce(100, 13)
    assert m == 4
    assert scale * reduce_mod(oracle[4], 13) % 13 == reduce_mod(oracle[100], 13)


def test_kummer_rejects_denominator_primes():
    with pytest.raises(ValueError):
        kummer_reduce(12, 7)
    with pytest.raises(ValueError):
        kummer_reduce(7, 11)


def test_kummer_range():
    for p in PRIMES_100:
        for k in range(2, 500, 2):
            if k % (p - 1) == 0:
                continue
            m, _ = kummer_reduce(k, p)
            assert m % 2 == 0 and 2 <= m <= p - 3


# ----------------------------------------------------------------- fast path


def test_fast_examples():
    plan = make_plan(7)
    assert (plan.n, plan.nprime, plan.mprime) == (3, 3, 1)
    assert bern_mod_p_fast(4, 7) == 3
    plan = make_plan(17)
    assert (plan.n, plan.nprime, plan.mprime) == (8, 4, 2)
    assert bern_mod_p_fast(4, 17) == bern_mod_p_basic(4, 17)
    # ord_2(31) = 5 divides 10
    with pytest.raises(FastPathInapplicable):
        bern_mod_p_fast(10, 31)
    # k = 6, p = 7 lies outside [2, p - 3] (and p - 1 | 6)
    with pytest.raises(ValueError):
        bern_mod_p_fast(6, 7)


def test_plan_invariants_below_1e4():
    for p in PRIMES_1E4:
        plan = make_plan(p)
        assert plan.nprime * plan.mprime == (p - 1) // 2
        assert (p - 1) % plan.n == 0


def test_kernel_setup_matches_reference():
    for p in PRIMES_1E4:
        g, n = K.generator_and_order(p)
        assert g == find_generator(p)
        assert n == order_of_two(p)


def test_paths_agree_with_oracle(oracle):
    rng = random.Random(11)
    for p in PRIMES_1E4[::7]:
        ks = [k for k in range(2, min(p - 2, 1001), 2)]
        for k in rng.sample(ks, min(8, len(ks))):
            expected = reduce_mod(oracle[k], p)
            assert bern_mod_p_basic(k, p) == expected
            if pow(2, k, p) != 1:
                assert bern_mod_p_fast(k, p, use_tables=True) == expected
                assert bern_mod_p_fast(k, p, use_tables=False) == expected


@pytest.mark.parametrize("block_bits", [64, 192, 4096, 1 << 16])
@pytest.mark.parametrize("capacity", [1, 2, None])
def test_fast_path_block_and_reduction_independent(block_bits, capacity):
    rng = random.Random(block_bits)
    for p in [12289, 40961, 65519, 100003]:
        k = rng.randrange(2, p - 2, 2)
        while pow(2, k, p) == 1:
            k = rng.randrange(2, p - 2, 2)
        ref = bern_mod_p_basic(k, p)
        assert bern_mod_p_fast(k, p, use_tables=True, block_bits=block_bits, capacity=capacity) == ref


def test_word_widths_agree():
    rng = random.Random(3)
    for p in [5, 7, 101, 7681, 65521]:
        for _ in range(5):
            k = rng.randrange(2, p - 2, 2) if p > 5 else 2
            ref = bern_mod_p_basic(k, p, w=32)
            assert bern_mod_p_basic(k, p, w=64) == ref
            if pow(2, k, p) != 1:
                assert bern_mod_p_fast(k, p, w=64, use_tables=True) == ref
                assert bern_mod_p_fast(k, p, w=32, use_tables=True) == ref


def test_large_prime_against_oracle(oracle):
    # p >= 2^30 runs with 64-bit Montgomery words
    p = 4294967279
    for k in (100, 998):
        assert bern_mod_p(k, p).rp == reduce_mod(oracle[k], p)


# ----------------------------------------------------------------- dispatch


@pytest.mark.parametrize("k, p", [(14, 5), (4, 7), (12, 11)])
def test_bern_mod_p_examples(k, p, oracle):
    pair = bern_mod_p(k, p)
    assert pair.p == p
    assert pair.rp == reduce_mod(oracle[k], p)


def test_bern_mod_p_12_11_value():
    # -691 = 2 and 2730 = 2 (mod 11)
    assert -691 % 11 == 2 and 2730 % 11 == 2
    assert bern_mod_p(12, 11).rp == 1


def test_bern_mod_p_rejects_denominator_prime():
    with pytest.raises(ValueError):
        bern_mod_p(12, 13)


def test_fallback_when_two_has_small_order(oracle):
    # ord_2(31) = 5 divides 10, ord_2(73) = 9 divides 18 and 90 = 18 (mod 72)
    assert bern_mod_p(10, 31).rp == reduce_mod(oracle[10], 31)
    assert bern_mod_p(18, 73).rp == reduce_mod(oracle[18], 73)
    assert bern_mod_p(90, 73).rp == reduce_mod(oracle[90], 73)
    _, paths = bern_mod_primes(10, np.array([31, 37]))
    assert paths.tolist() == [1, 0]


def test_batch_matches_single(oracle):
    k = 600
    ps = np.array([p for p in PRIMES_1E4 if k % (p - 1)][:300])
    res, _ = bern_mod_primes(k, ps)
    assert res.tolist() == [reduce_mod(oracle[k], int(p)) for p in ps]
    with pytest.raises(ValueError):
        bern_mod_primes(k, np.array([7]))
