"""Number-theoretic primitives: primality, modular powers, Legendre symbols
and a segmented prime sieve."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

WORD_LIMIT = 1 << 64

# Jaeschke / Sorenson-Webster: the first 12 primes decide every n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

DEFAULT_SEGMENT = 1 << 18


def mod_pow(base: int, exp: int, m: int) -> int:
    """Return ``base**exp % m`` by square-and-multiply."""
    if m < 2:
        raise ValueError(f"modulus must be >= 2, got {m}")
    if exp < 0:
        raise ValueError("exponent must be nonnegative")
    result = 1
    base %= m
    while exp:
        if exp & 1:
            result = result * base % m
        base = base * base % m
        exp >>= 1
    return result


def _mr_round(n: int, a: int, d: int, s: int) -> bool:
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for every n < 2**64."""
    if n >= WORD_LIMIT:
        raise ValueError(f"{n} exceeds the 64-bit word range")
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while not d & 1:
        d >>= 1
        s += 1
    return all(_mr_round(n, a, d, s) for a in _MR_BASES)


@dataclass(frozen=True)
class PrimeModulus:
    """An odd prime below 2**64 together with its classes mod 4 and mod 8."""

    p: int
    class_mod4: int = field(init=False)
    class_mod8: int = field(init=False)

    def __post_init__(self) -> None:
        p = self.p
        if isinstance(p, bool) or not isinstance(p, (int, np.integer)):
            raise TypeError(f"prime must be an integer, got {type(p).__name__}")
        p = int(p)
        object.__setattr__(self, "p", p)
        if p < 3 or p >= WORD_LIMIT or not is_prime(p):
            raise ValueError(f"{p} is not an odd prime below 2**64")
        object.__setattr__(self, "class_mod4", p % 4)
        object.__setattr__(self, "class_mod8", p % 8)

    def __int__(self) -> int:
        return self.p

    def __index__(self) -> int:
        return self.p


def as_modulus(p: PrimeModulus | int) -> PrimeModulus:
    return p if isinstance(p, PrimeModulus) else PrimeModulus(p)


# CharacterValue is represented by the plain ints +1, -1 and 0.
RESIDUE = 1
NONRESIDUE = -1
ZERO = 0


def legendre_euler(a: int, p: PrimeModulus | int) -> int:
    """Residuosity of ``a`` mod ``p`` by Euler's criterion."""
    q = int(p)
    a %= q
    if a == 0:
        return ZERO
    return RESIDUE if mod_pow(a, (q - 1) >> 1, q) == 1 else NONRESIDUE


def legendre_reciprocity(a: int, p: PrimeModulus | int) -> int:
    """Residuosity of ``a`` mod ``p`` by the binary Jacobi algorithm.

    Uses only quadratic reciprocity and the supplementary law for 2; no
    exponentiation is involved, so it is an independent check on
    :func:`legendre_euler`.
    """
    n = int(p)
    a %= n
    sign = 1
    while a:
        while not a & 1:
            a >>= 1
            if n & 7 in (3, 5):
                sign = -sign
        a, n = n, a
        if a & 3 == 3 and n & 3 == 3:
            sign = -sign
        a %= n
    return sign if n == 1 else ZERO


def _base_primes(limit: int) -> np.ndarray:
    """Primes <= limit by a plain sieve (limit is small: sqrt of the range)."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    mark = np.ones(limit + 1, dtype=bool)
    mark[:2] = False
    for q in range(2, math.isqrt(limit) + 1):
        if mark[q]:
            mark[q * q :: q] = False
    return np.flatnonzero(mark).astype(np.int64)


def prime_segments(
    lo: int, hi: int, segment: int = DEFAULT_SEGMENT
) -> Iterator[np.ndarray]:
    """Yield the primes of [lo, hi] as ascending int64 arrays, one per segment.

    Peak memory is O(segment + sqrt(hi)) regardless of hi - lo.
    """
    if lo > hi:
        raise ValueError(f"empty range: lo={lo} > hi={hi}")
    if lo < 2:
        raise ValueError(f"lo must be >= 2, got {lo}")
    if hi >= WORD_LIMIT:
        raise ValueError("range exceeds the 64-bit word")
    base = _base_primes(math.isqrt(hi))
    start = lo
    while start <= hi:
        stop = min(start + segment, hi + 1)
        mark = np.ones(stop - start, dtype=bool)
        for q in base:
            q = int(q)
            if q * q >= stop:
                break
            first = max(q * q, -(-start // q) * q)
            mark[first - start :: q] = False
        yield np.flatnonzero(mark).astype(np.int64) + start
        start = stop


def primes_in_range(
    lo: int, hi: int, class_filter: Optional[int] = None
) -> Iterator[int]:
    """Stream the primes of [lo, hi] in increasing order.

    ``class_filter`` (1 or 3) keeps only primes in that class mod 4.
    """
    if class_filter not in (None, 1, 3):
        raise ValueError(f"class filter must be 1 or 3 mod 4, got {class_filter}")
    for seg in prime_segments(lo, hi):
        if class_filter is not None:
            seg = seg[seg % 4 == class_filter]
        yield from seg.tolist()


def odd_primes_in_range(
    lo: int, hi: int, class_filter: Optional[int] = None
) -> Iterator[PrimeModulus]:
    """Like :func:`primes_in_range` but skips 2 and wraps each as a modulus."""
    lo = max(lo, 3)
    if lo > hi:
        return
    for q in primes_in_range(lo, hi, class_filter):
        yield PrimeModulus(q)


def ceil_log2(n: int) -> int:
    """Exact ceil(log2(n)) for n >= 1."""
    if n < 1:
        raise ValueError("n must be positive")
    return (n - 1).bit_length()
