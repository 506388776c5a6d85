import random

import pytest
from hypothesis import given, settings, strategies as st

from qrpatterns.ntcore import (
    PrimeModulus,
    ceil_log2,
    is_prime,
    legendre_euler,
    legendre_reciprocity,
    mod_pow,
    prime_segments,
    primes_in_range,
)

from oracles import trial_prime, trial_primes


@pytest.mark.parametrize("base, exp, m, expected", [(2, 3, 7, 1), (5, 0, 11, 1), (3, 3, 7, 6)])
def test_mod_pow_examples(base, exp, m, expected):
    assert mod_pow(base, exp, m) == expected


@given(st.integers(-10**20, 10**20), st.integers(0, 10**6), st.integers(2, 2**64))
def test_mod_pow_matches_builtin(base, exp, m):
    assert mod_pow(base, exp, m) == pow(base, exp, m)


def test_mod_pow_rejects_bad_modulus():
    with pytest.raises(ValueError):
        mod_pow(2, 3, 1)


@pytest.mark.parametrize("n, expected", [(7, True), (1, False), (0, False), (2, True), (561, False)])
def test_is_prime_examples(n, expected):
    assert is_prime(n) is expected


def test_is_prime_against_trial_division():
    assert [n for n in range(5000) if is_prime(n)] == [n for n in range(5000) if trial_prime(n)]


@pytest.mark.parametrize("n", [
    3215031751,            # strong pseudoprime to bases 2, 3, 5, 7
    3825123056546413051,   # strong pseudoprime to the first nine prime bases
    2**61 - 1,
    2**64 - 59,            # largest 64-bit prime
])
def test_is_prime_hard_cases(n):
    assert is_prime(n) == (n in (2**61 - 1, 2**64 - 59))


def test_is_prime_word_limit():
    with pytest.raises(ValueError):
        is_prime(2**64 + 13)


def test_prime_modulus_classes():
    m = PrimeModulus(23)
    assert (m.p, m.class_mod4, m.class_mod8) == (23, 3, 7)
    assert PrimeModulus(17).class_mod8 == 1


@pytest.mark.parametrize("bad", [2, 1, 9, 561, -7, 2**64 + 13])
def test_prime_modulus_rejects(bad):
    with pytest.raises(ValueError):
        PrimeModulus(bad)


@pytest.mark.parametrize("a, p, expected", [(2, 7, 1), (14, 7, 0), (3, 7, -1), (0, 11, 0), (-1, 7, -1), (-1, 13, 1)])
def test_legendre_examples(a, p, expected):
    assert legendre_euler(a, p) == expected
    assert legendre_reciprocity(a, p) == expected


def test_minus_one_is_nonresidue_for_class3():
    for p in trial_primes(3, 2000):
        if p % 4 == 3:
            assert legendre_euler(p - 1, p) == -1


small_primes = trial_primes(3, 3000)


@settings(max_examples=300)
@given(st.sampled_from(small_primes), st.integers(1, 10**9), st.integers(1, 10**9))
def test_multiplicativity(p, a, b):
    if a % p == 0 or b % p == 0:
        return
    assert legendre_euler(a * b, p) == legendre_euler(a, p) * legendre_euler(b, p)
    assert legendre_reciprocity(a * b, p) == legendre_reciprocity(a, p) * legendre_reciprocity(b, p)


@settings(max_examples=200)
@given(st.sampled_from(small_primes), st.integers(1, 10**6))
def test_negation_symmetry(p, a):
    if a % p == 0:
        return
    sign = -1 if p % 4 == 3 else 1
    assert legendre_euler(p - a, p) == sign * legendre_euler(a, p)


def test_legendre_routes_agree_on_large_primes():
    rng = random.Random(5)
    big = [2**61 - 1, 2**64 - 59, 1000000007, 4294967291]
    for p in big:
        for _ in range(200):
            a = rng.randrange(-2**64, 2**64)
            assert legendre_euler(a, p) == legendre_reciprocity(a, p)


@pytest.mark.parametrize("lo, hi, cls, expected", [
    (2, 12, None, [2, 3, 5, 7, 11]),
    (2, 25, 3, [3, 7, 11, 19, 23]),
    (90, 96, None, []),
])
def test_primes_in_range_examples(lo, hi, cls, expected):
    assert list(primes_in_range(lo, hi, cls)) == expected


def test_primes_in_range_against_trial_division():
    assert list(primes_in_range(2, 100_000)) == trial_primes(2, 100_000)


@given(st.integers(2, 20_000), st.integers(0, 3000), st.sampled_from([None, 1, 3]))
@settings(max_examples=60)
def test_primes_in_range_windows(lo, width, cls):
    want = [q for q in trial_primes(lo, lo + width) if cls is None or q % 4 == cls]
    assert list(primes_in_range(lo, lo + width, cls)) == want


def test_segments_are_bounded_and_seamless():
    segs = list(prime_segments(2, 50_000, segment=1000))
    assert all(len(s) <= 1000 for s in segs)
    joined = [int(q) for s in segs for q in s]
    assert joined == trial_primes(2, 50_000)


def test_primes_in_range_errors():
    with pytest.raises(ValueError):
        list(primes_in_range(10, 5))
    with pytest.raises(ValueError):
        list(primes_in_range(2, 10, class_filter=2))


@pytest.mark.parametrize("n, expected", [(1, 0), (2, 1), (3, 2), (7, 3), (8, 3), (11, 4), (19, 5), (2**40 + 1, 41)])
def test_ceil_log2(n, expected):
    assert ceil_log2(n) == expected
