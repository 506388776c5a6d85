"""Checks of the finitely verifiable claims about residue patterns, plus the
measurement-only experiments on n(p)."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np

from .chartab import DEFAULT_MEMORY_BUDGET, build_character_table
from .ntcore import PrimeModulus, as_modulus, ceil_log2
from .patterns import K_MAX, Pattern, PatternCensus, census, code_to_string, least_nonresidue

SHDS_CAP = 10_000


def _require_class3(p: int, what: str) -> None:
    if p % 4 != 3:
        raise ValueError(f"{what} needs p = 3 mod 4, got p={p}")


@dataclass(frozen=True)
class ShdsReport:
    p: int
    is_shds: bool
    lambda_expected: int
    multiset_min: int
    multiset_max: int
    partition_ok: bool


def verify_shds(p: PrimeModulus | int, cap: int = SHDS_CAP) -> ShdsReport:
    """Brute-force difference-set check of the quadratic residues mod p."""
    q = as_modulus(p).p
    _require_class3(q, "verify_shds")
    if q > cap:
        raise ValueError(f"p={q} exceeds the brute-force cap {cap}")
    residues = np.asarray(build_character_table(q).residue_set(), dtype=np.int64)
    hits = np.zeros(q, dtype=np.int64)
    step = max(1, (1 << 22) // max(len(residues), 1))
    for lo in range(0, len(residues), step):
        diffs = (residues[lo : lo + step, None] - residues[None, :]) % q
        hits += np.bincount(diffs.ravel(), minlength=q)
    # d1 == d2 contributes only to hits[0]
    nonzero = hits[1:]
    lam = (q - 3) // 4
    lo_m, hi_m = int(nonzero.min()), int(nonzero.max())

    negated = (q - residues) % q
    in_d = np.zeros(q, dtype=bool)
    in_d[residues] = True
    partition_ok = (
        not in_d[0]
        and not in_d[negated].any()
        and len(residues) + len(set(negated.tolist())) == q - 1
    )
    return ShdsReport(q, lo_m == hi_m == lam and partition_ok, lam, lo_m, hi_m, partition_ok)


@dataclass(frozen=True)
class PeraltaReport:
    p: int
    k: int
    all_in_range: bool
    worst_deviation: Fraction
    worst_pattern: str
    bound: float


def _within_peralta(count: int, p: int, k: int) -> bool:
    # |count - p/2^k| <= k(3 + sqrt p), scaled by 2^k and squared to stay exact
    gap = abs(count * (1 << k) - p)
    m = k << k
    excess = gap - 3 * m
    return excess <= 0 or excess * excess <= m * m * p


def peralta_check(cen: PatternCensus) -> PeraltaReport:
    p, k = cen.p, cen.k
    scaled = np.abs(cen.counts * (1 << k) - p)
    worst = int(np.argmax(scaled))
    ok = all(_within_peralta(int(c), p, k) for c in np.unique(cen.counts))
    return PeraltaReport(
        p,
        k,
        ok,
        Fraction(int(scaled[worst]), 1 << k),
        code_to_string(worst, k),
        k * (3 + math.sqrt(p)),
    )


def classify_type(pat: Pattern | str) -> int:
    """1: r..r, 2: r..n, 3: n..r, 4: n..n."""
    k = len(pat) if isinstance(pat, str) else pat.k
    if k < 2:
        raise ValueError("pattern type needs k >= 2")
    if isinstance(pat, str):
        first, last = pat[0], pat[-1]
    else:
        first, last = pat.first, pat.last
    return 1 + 2 * (first == "n") + (last == "n")


def _types(k: int) -> np.ndarray:
    codes = np.arange(1 << k)
    return 1 + 2 * (1 - (codes >> (k - 1))) + (1 - (codes & 1))


@dataclass(frozen=True)
class DeviationReport:
    p: int
    k: int
    baseline_floor: int
    baseline_exact: Fraction
    type_sums: tuple[int, int, int, int]
    e_values: dict[int, list[tuple[str, int]]]
    e_sum_per_type: tuple[int, int, int, int]
    e_min: int
    e_max: int
    # (p-3)/4 and the gaps S1 - (p-3)/4, S4 - (p-3)/4; None unless p = 3 mod 4
    pair_target: Optional[int] = None
    s1_discrepancy: Optional[int] = None
    s4_discrepancy: Optional[int] = None


def deviations(cen: PatternCensus) -> DeviationReport:
    p, k = cen.p, cen.k
    if k < 2:
        raise ValueError("deviations need k >= 2")
    base = p >> k
    e = cen.counts - base
    types = _types(k)
    sums = tuple(int(cen.counts[types == t].sum()) for t in (1, 2, 3, 4))
    e_sums = tuple(int(e[types == t].sum()) for t in (1, 2, 3, 4))
    grouped = {
        t: [(code_to_string(int(c), k), int(e[c])) for c in np.flatnonzero(types == t)]
        for t in (1, 2, 3, 4)
    }
    target = s1_gap = s4_gap = None
    if p % 4 == 3:
        target = (p - 3) // 4
        s1_gap, s4_gap = sums[0] - target, sums[3] - target
    return DeviationReport(
        p, k, base, Fraction(p, 1 << k), sums, grouped, e_sums,
        int(e.min()), int(e.max()), target, s1_gap, s4_gap,
    )


def reverse_complement_codes(k: int) -> np.ndarray:
    """reverse_complement applied to every k-bit code at once."""
    codes = np.arange(1 << k, dtype=np.int64)
    rev = np.zeros_like(codes)
    for j in range(k):
        rev |= ((codes >> j) & 1) << (k - 1 - j)
    return rev ^ ((1 << k) - 1)


def duality_check(cen: PatternCensus) -> bool:
    _require_class3(cen.p, "duality_check")
    return bool(np.array_equal(cen.counts, cen.counts[reverse_complement_codes(cen.k)]))


def dichotomy_values(p: int, k: int) -> set[int]:
    """The allowed census counts for k = 2 or 3 when p = 3 mod 4."""
    if k == 2:
        return {(p - 3) // 4, (p - 3) // 4 + 1}
    if k == 3:
        return {(p - 3) // 8, -(-(p - 3) // 8)}
    raise ValueError(f"the dichotomy is only established for k in (2, 3), got {k}")


def dichotomy_check(cen: PatternCensus) -> bool:
    _require_class3(cen.p, "dichotomy_check")
    allowed = dichotomy_values(cen.p, cen.k)
    return set(np.unique(cen.counts).tolist()) <= allowed


@dataclass(frozen=True)
class ThresholdReport:
    p: int
    k_star: int
    census_max: int
    census_nonzero: int
    histogram: dict[int, int]


def threshold_experiment(
    p: PrimeModulus | int,
    k_max: int = K_MAX,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
) -> ThresholdReport:
    """Census at k = ceil(log2 p); measures, judges nothing."""
    q = as_modulus(p).p
    if q < 5:
        raise ValueError("threshold experiment needs p >= 5")
    k_star = ceil_log2(q)
    if k_star > k_max:
        raise ValueError(f"ceil(log2 {q}) = {k_star} exceeds k_max={k_max}")
    cen = census(build_character_table(q, memory_budget), k_star, k_max)
    freq = np.bincount(cen.counts)
    hist = {int(v): int(f) for v, f in enumerate(freq) if f}
    return ThresholdReport(
        q, k_star, int(cen.counts.max()), int(np.count_nonzero(cen.counts)), hist
    )


_VINOGRADOV_EXP = 1 / math.sqrt(2 * math.e)
_BURGESS_EXP = 1 / (4 * math.sqrt(math.e))


@dataclass(frozen=True)
class ScanRecord:
    p: int
    n_p: int
    k_star: int
    ratio: float
    gauss_bound: Optional[float]
    vinogradov_bound: float
    ankeny_shape: float
    burgess_shape: float


def scan_record(p: int, n_p: Optional[int] = None) -> ScanRecord:
    if n_p is None:
        n_p = least_nonresidue(p)
    k_star = ceil_log2(p)
    log_p = math.log(p)
    return ScanRecord(
        p,
        n_p,
        k_star,
        n_p / k_star,
        2 * math.sqrt(p) + 1 if p % 8 == 1 else None,
        p**_VINOGRADOV_EXP * log_p**2,
        log_p**2,
        p**_BURGESS_EXP,
    )


def violates_gauss(p: int, n_p: int) -> bool:
    """n_p >= 2 sqrt(p) + 1, decided exactly (only meaningful for p = 1 mod 8)."""
    return n_p >= 1 and (n_p - 1) ** 2 >= 4 * p


@dataclass
class BoundSummary:
    max_ratio: float
    max_ratio_p: int
    violations_gauss: int
    decade_max: dict[int, tuple[int, int]] = field(default_factory=dict)
    records: int = 0


def bound_table(records: Iterable[ScanRecord]) -> BoundSummary:
    """Fold scan records into the ratio maximum, Gauss violations and the
    largest n(p) per decade of p (keyed by floor(log10 p), value (p, n_p))."""
    best: Optional[tuple[Fraction, ScanRecord]] = None
    violations = 0
    decades: dict[int, tuple[int, int]] = {}
    seen = 0
    for rec in records:
        seen += 1
        ratio = Fraction(rec.n_p, rec.k_star)
        if best is None or ratio > best[0]:
            best = (ratio, rec)
        if rec.p % 8 == 1 and violates_gauss(rec.p, rec.n_p):
            violations += 1
        decade = len(str(rec.p)) - 1
        top = decades.get(decade)
        if top is None or rec.n_p > top[1]:
            decades[decade] = (rec.p, rec.n_p)
    if best is None:
        raise ValueError("bound_table needs at least one record")
    return BoundSummary(float(best[0]), best[1].p, violations, decades, seen)
