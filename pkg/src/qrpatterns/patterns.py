"""Residue/nonresidue patterns: encoding, census of consecutive windows,
arithmetic-progression counts and the least nonresidue."""

from __future__ import annotations

import math
from functools import lru_cache

from dataclasses import dataclass
from typing import Literal, Union

import numpy as np

from .chartab import CharacterTable
from .ntcore import NONRESIDUE, RESIDUE, PrimeModulus, as_modulus, legendre_euler

K_MAX = 26
CENSUS_CHUNK = 1 << 22

Kind = Literal["residue", "nonresidue"]
KINDS = ("residue", "nonresidue")


@dataclass(frozen=True)
class Pattern:
    """A residue word of length k; the earliest position is the top bit."""

    k: int
    code: int

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError(f"pattern length must be >= 1, got {self.k}")
        if not 0 <= self.code < 1 << self.k:
            raise ValueError(f"code {self.code} does not fit in {self.k} bits")

    def __str__(self) -> str:
        return pattern_to_string(self)

    def bit(self, j: int) -> int:
        """Symbol at window position j (1 = residue)."""
        return (self.code >> (self.k - 1 - j)) & 1

    @property
    def first(self) -> str:
        return "r" if self.bit(0) else "n"

    @property
    def last(self) -> str:
        return "r" if self.code & 1 else "n"


def pattern_from_string(s: str, k_max: int = K_MAX) -> Pattern:
    if not s:
        raise ValueError("empty pattern")
    if len(s) > k_max:
        raise ValueError(f"pattern length {len(s)} exceeds k_max={k_max}")
    if set(s) - {"r", "n"}:
        raise ValueError(f"pattern {s!r} must use only 'r' and 'n'")
    return Pattern(len(s), int(s.replace("r", "1").replace("n", "0"), 2))


def pattern_to_string(pat: Pattern) -> str:
    return format(pat.code, f"0{pat.k}b").replace("1", "r").replace("0", "n")


def code_to_string(code: int, k: int) -> str:
    return pattern_to_string(Pattern(k, code))


def reverse_complement(code: int, k: int) -> int:
    """Reverse the k-bit word and flip every symbol."""
    rev = int(format(code, f"0{k}b")[::-1], 2)
    return rev ^ ((1 << k) - 1)


@dataclass(frozen=True, eq=False)
class PatternCensus:
    modulus: PrimeModulus
    k: int
    counts: np.ndarray  # int64, length 2**k, read-only

    @property
    def p(self) -> int:
        return self.modulus.p

    def __getitem__(self, pat: Union[Pattern, str, int]) -> int:
        if isinstance(pat, str):
            pat = pattern_from_string(pat, self.k)
        if isinstance(pat, Pattern):
            if pat.k != self.k:
                raise ValueError(f"pattern length {pat.k} != census length {self.k}")
            pat = pat.code
        return int(self.counts[pat])

    def total(self) -> int:
        return int(self.counts.sum())

    def items(self):
        """(pattern string, count) pairs in code order."""
        return [(code_to_string(c, self.k), int(n)) for c, n in enumerate(self.counts)]


def window_codes(bits: np.ndarray, k: int) -> np.ndarray:
    """Codes of every length-k window of a 0/1 array, by binary doubling.

    Returns int64 codes for starts 0 .. len(bits)-k.
    """
    length = len(bits)
    if length < k:
        return np.empty(0, dtype=np.int64)
    block = bits.astype(np.int64)  # block[i]: code of bits[i : i+width]
    width = 1
    out, out_w = None, 0  # out[i]: code of bits[i : i+out_w]
    remaining = k
    while True:
        if remaining & 1:
            if out is None:
                out, out_w = block, width
            else:
                m = length - out_w - width + 1
                out = (out[:m] << width) | block[out_w : out_w + m]
                out_w += width
        remaining >>= 1
        if not remaining:
            break
        block = (block[:-width] << width) | block[width:]
        width <<= 1
    return out[: length - k + 1]


def _nonzero_bits(table: CharacterTable) -> np.ndarray:
    # positions 1 .. p-1
    return table.residues()[1:]


def _check_census_k(p: int, k: int, k_max: int) -> None:
    if not 1 <= k <= k_max:
        raise ValueError(f"k={k} outside [1, {k_max}]")
    if k > p - 2:
        raise ValueError(f"k={k} leaves no window for p={p} (need k <= p-2)")


def census(
    table: CharacterTable, k: int, k_max: int = K_MAX, chunk: int = CENSUS_CHUNK
) -> PatternCensus:
    """Occurrence counts of all 2**k patterns over window starts 1 .. p-k.

    Starts are processed in chunks that overlap by k-1 positions; per-chunk
    counts are summed, so the result does not depend on ``chunk``.
    """
    p = table.p
    _check_census_k(p, k, k_max)
    bits = _nonzero_bits(table)
    starts = p - k
    counts = np.zeros(1 << k, dtype=np.int64)
    for s in range(0, starts, chunk):
        e = min(s + chunk, starts)
        codes = window_codes(bits[s : e + k - 1], k)
        counts += np.bincount(codes, minlength=1 << k)
    if counts.sum() != starts:
        raise AssertionError(f"census mass {counts.sum()} != p-k={starts}")
    counts.flags.writeable = False
    return PatternCensus(table.modulus, k, counts)


def count_pattern(table: CharacterTable, pat: Pattern | str) -> int:
    """Occurrences of one pattern, without building the 2**k counters.

    Candidate starts are filtered one position at a time, so the work is
    O(p) on average for any k.
    """
    if isinstance(pat, str):
        pat = pattern_from_string(pat, k_max=max(len(pat), 1))
    p = table.p
    _check_census_k(p, pat.k, p)
    bits = _nonzero_bits(table)
    cand = np.arange(p - pat.k, dtype=np.int64)
    for j in range(pat.k):
        if not len(cand):
            break
        cand = cand[bits[cand + j] == pat.bit(j)]
    return len(cand)


@lru_cache(maxsize=8)
def multiples(p: int, d: int) -> np.ndarray:
    """[j*d mod p for j in range(p)] without a full-length integer division.

    Cached (read-only) since a suite asks for the same orbit several times.
    """
    width = math.isqrt(p) + 1
    base = (np.arange(width, dtype=np.int64) * d) % p
    offsets = (np.arange(-(-p // width), dtype=np.int64) * (width * d % p)) % p
    out = np.add.outer(offsets, base).ravel()[:p]
    out[out >= p] -= p
    out.flags.writeable = False
    return out


def all_true_windows(flags: np.ndarray, k: int) -> np.ndarray:
    """w[i] = all(flags[i : i+k]), by the same doubling as window_codes."""
    length = len(flags)
    if length < k:
        return np.zeros(0, dtype=bool)
    block, width = flags, 1
    out, out_w = None, 0
    remaining = k
    while True:
        if remaining & 1:
            if out is None:
                out, out_w = block, width
            else:
                m = length - out_w - width + 1
                out = out[:m] & block[out_w : out_w + m]
                out_w += width
        remaining >>= 1
        if not remaining:
            break
        block = block[:-width] & block[width:]
        width <<= 1
    return out[: length - k + 1]


@dataclass(frozen=True)
class APCount:
    p: int
    k: int
    d: int
    kind: str
    count: int


def _kind_value(kind: Kind | int) -> int:
    if kind in ("residue", RESIDUE):
        return RESIDUE
    if kind in ("nonresidue", NONRESIDUE):
        return NONRESIDUE
    raise ValueError(f"kind must be 'residue' or 'nonresidue', got {kind!r}")


def count_ap(table: CharacterTable, k: int, d: int, kind: Kind | int = "residue") -> APCount:
    """Number of starts a in Z_p with a, a+d, ..., a+(k-1)d all nonzero and
    all of the requested character.

    Writing a = j*d turns the progression into the consecutive multiples
    j*d, (j+1)*d, ..., so one gather along the orbit of d reduces the count
    to circular runs in that sequence.
    """
    p = table.p
    want = _kind_value(kind)
    if k < 2:
        raise ValueError(f"AP length must be >= 2, got {k}")
    if d % p == 0:
        raise ValueError(f"common difference {d} is 0 mod {p}")
    d %= p
    hit = table.residues().view(bool)[multiples(p, d)]
    if want == NONRESIDUE:
        hit = ~hit
        hit[0] = False  # the orbit starts at 0, which is neither
    if k > p:
        count = 0  # every window meets 0
    else:
        count = int(np.count_nonzero(all_true_windows(np.concatenate((hit, hit[: k - 1])), k)))
    return APCount(p, k, d, "residue" if want == RESIDUE else "nonresidue", count)


def least_nonresidue(p: PrimeModulus | int) -> int:
    """Smallest n >= 2 with (n/p) = -1, by streaming Euler tests."""
    q = as_modulus(p).p
    n = 2
    while legendre_euler(n, q) != NONRESIDUE:
        n += 1
    return n
