"""Per-prime verification suites and the parallel drivers behind the CLI.

Every unit of work is a pure function of its arguments, so results are
merged in submission order and reports do not depend on the worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Optional, Sequence, TypeVar

from .analysis import (
    dichotomy_values,
    duality_check,
    peralta_check,
    reverse_complement_codes,
    verify_shds,
)
from .chartab import build_character_table
from .ntcore import prime_segments
from .patterns import KINDS, census, code_to_string, count_ap, least_nonresidue

SUITES = ("shds", "ap", "dichotomy", "peralta", "duality")
SUITE_K = 12
SHDS_SUITE_MAX = 499

T = TypeVar("T")
R = TypeVar("R")


@dataclass(frozen=True)
class CheckRow:
    suite: str
    p: int
    k: Optional[int]
    d: Optional[int]
    kind: Optional[str]
    pattern: Optional[str]
    expected: str
    actual: str
    ok: bool


CHECK_COLUMNS = ("suite", "p", "k", "d", "kind", "pattern", "expected", "actual", "ok")


def ap_differences(p: int) -> list[int]:
    return sorted({1, 2, 5, (p - 1) // 2, p - 1} - {0})


def suite_applies(suite: str, p: int) -> bool:
    if suite == "peralta":
        return p >= 5
    if p % 4 != 3:
        return False
    if suite == "shds":
        return p <= SHDS_SUITE_MAX
    if suite in ("ap", "dichotomy"):
        return p >= 7
    return p >= 7  # duality: at least k=2 must fit


def check_prime(p: int, suites: Sequence[str], suite_k: int = SUITE_K) -> list[CheckRow]:
    """Run the requested suites on one prime."""
    rows: list[CheckRow] = []
    table = build_character_table(p)
    censuses = {}

    def get_census(k):
        if k not in censuses:
            censuses[k] = census(table, k)
        return censuses[k]

    ks = range(2, min(suite_k, p - 2) + 1)
    for suite in suites:
        if not suite_applies(suite, p):
            continue
        if suite == "shds":
            rep = verify_shds(p)
            actual = f"{rep.multiset_min}..{rep.multiset_max}"
            if not rep.partition_ok:
                actual += ";partition-broken"
            rows.append(CheckRow("shds", p, None, None, None, None,
                                 str(rep.lambda_expected), actual, rep.is_shds))
        elif suite == "ap":
            for k, expected in ((2, (p - 3) // 4), (3, (p - 3) // 8)):
                for d in ap_differences(p):
                    for kind in KINDS:
                        got = count_ap(table, k, d, kind).count
                        rows.append(CheckRow("ap", p, k, d, kind, None,
                                             str(expected), str(got), got == expected))
        elif suite == "dichotomy":
            for k in (2, 3):
                allowed = dichotomy_values(p, k)
                rows.extend(_count_rows("dichotomy", p, get_census(k), allowed))
        elif suite == "peralta":
            for k in ks:
                rep = peralta_check(get_census(k))
                rows.append(CheckRow("peralta", p, k, None, None, rep.worst_pattern,
                                     f"<={rep.bound:.6g}", str(rep.worst_deviation),
                                     rep.all_in_range))
        elif suite == "duality":
            for k in ks:
                cen = get_census(k)
                ok = duality_check(cen)
                rows.append(CheckRow("duality", p, k, None, None, None,
                                     "symmetric", "symmetric" if ok else "asymmetric", ok))
                if not ok:
                    partner = reverse_complement_codes(k)
                    for code in range(1 << k):
                        a, b = int(cen.counts[code]), int(cen.counts[partner[code]])
                        if a != b:
                            rows.append(CheckRow("duality", p, k, None, None,
                                                 code_to_string(code, k), str(b), str(a), False))
        else:
            raise ValueError(f"unknown suite {suite!r}")
    return rows


def _count_rows(suite, p, cen, allowed) -> list[CheckRow]:
    expected = "|".join(str(v) for v in sorted(allowed))
    lo, hi = int(cen.counts.min()), int(cen.counts.max())
    ok = {lo, hi} <= allowed and set(cen.counts.tolist()) <= allowed
    rows = [CheckRow(suite, p, cen.k, None, None, None, expected, f"{lo}..{hi}", ok)]
    if not ok:
        for code, n in enumerate(cen.counts.tolist()):
            if n not in allowed:
                rows.append(CheckRow(suite, p, cen.k, None, None,
                                     code_to_string(code, cen.k), expected, str(n), False))
    return rows


def _check_batch(args) -> list[CheckRow]:
    primes, suites, suite_k = args
    out: list[CheckRow] = []
    for p in primes:
        out.extend(check_prime(p, suites, suite_k))
    return out


def default_threads() -> int:
    return os.cpu_count() or 1


def ordered_map(fn: Callable[[T], R], items: Iterable[T], threads: int) -> Iterator[R]:
    """map() over a process pool; results come back in input order."""
    if threads <= 1:
        yield from map(fn, items)
        return
    with ProcessPoolExecutor(max_workers=threads) as pool:
        yield from pool.map(fn, items)


def _batches(primes: Sequence[int], size: int) -> list[list[int]]:
    return [list(primes[i : i + size]) for i in range(0, len(primes), size)]


def run_checks(
    primes: Sequence[int],
    suites: Sequence[str],
    threads: int = 1,
    suite_k: int = SUITE_K,
    batch: int = 64,
) -> Iterator[CheckRow]:
    jobs = [(b, tuple(suites), suite_k) for b in _batches(primes, batch)]
    for rows in ordered_map(_check_batch, jobs, threads):
        yield from rows


def _scan_segment(args) -> list[tuple[int, int]]:
    lo, hi, class_filter = args
    out = []
    for seg in prime_segments(lo, hi):
        if class_filter is not None:
            seg = seg[seg % 4 == class_filter]
        out.extend((p, least_nonresidue(p)) for p in seg.tolist())
    return out


SCAN_SEGMENT = 1 << 20


def scan_nonresidues(
    lo: int,
    hi: int,
    class_filter: Optional[int] = None,
    threads: int = 1,
    segment: int = SCAN_SEGMENT,
) -> Iterator[tuple[int, list[tuple[int, int]]]]:
    """Least nonresidues of the odd primes in [lo, hi].

    Yields ``(segment_end, [(p, n_p), ...])`` per segment in ascending order;
    a caller may checkpoint after each one.
    """
    lo = max(lo, 3)
    if lo > hi:
        return
    bounds = [(s, min(s + segment - 1, hi), class_filter) for s in range(lo, hi + 1, segment)]
    for (_, end, _), found in zip(bounds, ordered_map(_scan_segment, bounds, threads)):
        yield end, found
