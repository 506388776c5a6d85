"""Command-line front end.

Exit status: 0 success, 1 a verification check failed, 2 usage or
configuration error, 3 resource limit (memory budget or k_max).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import random
import sys
from dataclasses import asdict, dataclass, field
from typing import Any, Iterable, Optional, Sequence

from . import __version__
from .analysis import ScanRecord, bound_table, scan_record, threshold_experiment
from .chartab import DEFAULT_MEMORY_BUDGET, BudgetExceeded, build_character_table
from .ntcore import PrimeModulus, ceil_log2, odd_primes_in_range
from .patterns import K_MAX, census, count_ap, count_pattern, pattern_from_string
from .suites import (
    CHECK_COLUMNS,
    SUITE_K,
    SUITES,
    default_threads,
    run_checks,
    scan_nonresidues,
    suite_applies,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3

SCAN_COLUMNS = ("p", "n_p", "k_star", "ratio", "gauss_bound", "vinogradov_bound",
                "ankeny_shape", "burgess_shape")
CENSUS_COLUMNS = ("pattern", "count", "expected", "deviation")
AP_COLUMNS = ("p", "k", "d", "kind", "count")
THRESHOLD_COLUMNS = ("p", "k_star", "windows", "census_max", "census_nonzero", "histogram")


class UsageError(Exception):
    pass


class ResourceError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    p: Optional[int] = None
    lo: Optional[int] = None
    hi: Optional[int] = None
    k: Optional[int] = None
    d: Optional[int] = None
    kind: Optional[str] = None
    pattern: Optional[str] = None
    suite: str = "all"
    suite_k: int = SUITE_K
    class3_only: bool = False
    sample: Optional[int] = None
    seed: int = 0
    threads: int = 1
    format: str = "csv"
    out: Optional[str] = None
    checkpoint: Optional[str] = None
    memory_budget: int = DEFAULT_MEMORY_BUDGET
    k_max: int = K_MAX

    def validate(self) -> None:
        if self.threads < 1:
            raise UsageError("--threads must be >= 1")
        if self.format not in ("csv", "json"):
            raise UsageError("--format must be csv or json")
        if self.lo is not None and self.hi is not None and self.lo > self.hi:
            raise UsageError(f"empty range [{self.lo}, {self.hi}]")
        if self.checkpoint and (self.format != "csv" or not self.out):
            raise UsageError("--checkpoint needs --format csv and --out FILE")


def fmt(value: Any) -> str:
    """CSV rendering: floats to 6 significant digits, None as empty."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".6g")
    return str(value)


def render_csv(columns: Sequence[str], rows: Iterable[dict], header: bool = True) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if header:
        writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(row[c]) for c in columns])
    return buf.getvalue()


def _json_value(value: Any) -> Any:
    if isinstance(value, float):
        return float(format(value, ".6g"))
    return value


def render_json(config: RunConfig, columns: Sequence[str], rows: Iterable[dict]) -> str:
    doc = {
        "meta": {"tool": "qrpatterns", "version": __version__, "config": asdict(config)},
        "rows": [{c: _json_value(row[c]) for c in columns} for row in rows],
    }
    return json.dumps(doc, indent=1) + "\n"


def emit(config: RunConfig, columns: Sequence[str], rows: list[dict]) -> None:
    if config.format == "json":
        text = render_json(config, columns, rows)
    else:
        text = render_csv(columns, rows)
    if config.out:
        _atomic_write(config.out, text)
    else:
        sys.stdout.write(text)


def _atomic_write(path: str, text: str) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _table(config: RunConfig, p: int):
    try:
        mod = PrimeModulus(p)
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from exc
    try:
        return build_character_table(mod, config.memory_budget)
    except BudgetExceeded as exc:
        raise ResourceError(str(exc)) from exc


def cmd_census(config: RunConfig) -> int:
    if config.p is None or config.k is None and config.pattern is None:
        raise UsageError("census needs --p and --k (or --pattern)")
    p = config.p
    if config.pattern is not None:
        try:
            pat = pattern_from_string(config.pattern, k_max=max(len(config.pattern), 1))
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        if config.k is not None and config.k != pat.k:
            raise UsageError("--k disagrees with the pattern length")
        if pat.k > p - 2:
            raise UsageError(f"pattern length {pat.k} leaves no window for p={p}")
        table = _table(config, p)
        items = [(config.pattern, count_pattern(table, pat))]
        k = pat.k
    else:
        k = config.k
        if k > config.k_max:
            raise ResourceError(f"k={k} exceeds k_max={config.k_max}")
        if not 1 <= k <= p - 2:
            raise UsageError(f"k={k} outside [1, p-2]")
        items = census(_table(config, p), k, config.k_max).items()
    expected = p / 2**k
    rows = [{"pattern": s, "count": n, "expected": expected, "deviation": n - expected}
            for s, n in items]
    emit(config, CENSUS_COLUMNS, rows)
    return EXIT_OK


def cmd_ap(config: RunConfig) -> int:
    if None in (config.p, config.k, config.d):
        raise UsageError("ap-count needs --p, --k and --d")
    table = _table(config, config.p)
    try:
        res = count_ap(table, config.k, config.d, config.kind or "residue")
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    emit(config, AP_COLUMNS, [asdict(res)])
    return EXIT_OK


def _suite_list(name: str) -> tuple[str, ...]:
    if name == "all":
        return SUITES
    if name not in SUITES:
        raise UsageError(f"unknown suite {name!r}")
    return (name,)


def cmd_verify(config: RunConfig) -> int:
    if config.hi is None:
        raise UsageError("verify needs --max-p")
    suites = _suite_list(config.suite)
    lo = config.lo or 3
    primes = [m.p for m in odd_primes_in_range(lo, config.hi)
              if any(suite_applies(s, m.p) for s in suites)]
    if config.sample is not None and config.sample < len(primes):
        primes = sorted(random.Random(config.seed).sample(primes, config.sample))
    rows = [asdict(r) for r in run_checks(primes, suites, config.threads, config.suite_k)]
    emit(config, CHECK_COLUMNS, rows)
    failures = [r for r in rows if not r["ok"]]
    for r in failures:
        print("FAIL " + " ".join(f"{c}={fmt(r[c])}" for c in CHECK_COLUMNS if c != "ok"),
              file=sys.stderr)
    print(f"verify: {len(rows)} checks over {len(primes)} primes, {len(failures)} failures",
          file=sys.stderr)
    return EXIT_FAIL if failures else EXIT_OK


def scan_row(rec: ScanRecord) -> dict:
    return asdict(rec)


def _read_checkpoint(path: str) -> Optional[int]:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read().strip()
    except FileNotFoundError:
        return None
    if not text.isdigit():
        raise UsageError(f"corrupt checkpoint {path!r}: {text!r}")
    return int(text)


def _truncate_scan_output(path: str, last: int) -> bool:
    """Keep only the header and rows with p <= last; False if there is no
    usable previous output."""
    if not os.path.exists(path):
        return False
    with open(path, encoding="utf-8", newline="") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != ",".join(SCAN_COLUMNS):
        return False
    kept = [lines[0]] + [ln for ln in lines[1:] if ln and int(ln.split(",", 1)[0]) <= last]
    _atomic_write(path, "\n".join(kept) + "\n")
    return True


def cmd_scan(config: RunConfig) -> int:
    if config.lo is None or config.hi is None:
        raise UsageError("scan-nonresidue needs --min and --max")
    class_filter = 3 if config.class3_only else None
    lo = config.lo
    resume = False
    if config.checkpoint:
        last = _read_checkpoint(config.checkpoint)
        if last is not None and _truncate_scan_output(config.out, last):
            resume = True
            lo = max(lo, last + 1)

    records: list[ScanRecord] = []
    streaming = config.format == "csv" and config.out is not None
    fh = None
    if streaming:
        fh = open(config.out, "a" if resume else "w", encoding="utf-8", newline="")
        if not resume:
            fh.write(render_csv(SCAN_COLUMNS, []))
    try:
        if lo <= config.hi:
            for _, found in scan_nonresidues(lo, config.hi, class_filter, config.threads):
                batch = [scan_record(p, n) for p, n in found]
                records.extend(batch)
                if fh is not None:
                    fh.write(render_csv(SCAN_COLUMNS, map(scan_row, batch), header=False))
                    fh.flush()
                    if config.checkpoint and batch:
                        os.fsync(fh.fileno())
                        _atomic_write(config.checkpoint, f"{batch[-1].p}\n")
    finally:
        if fh is not None:
            fh.close()
    if not streaming:
        emit(config, SCAN_COLUMNS, [scan_row(r) for r in records])

    if resume:
        # the summary covers the whole range, so re-read the earlier rows
        records = _load_scan_records(config.out)
    if not records:
        print("scan: no primes in range", file=sys.stderr)
        return EXIT_OK
    summary = bound_table(records)
    print(f"scan: {summary.records} primes, max n(p)/ceil(log2 p) = "
          f"{summary.max_ratio:.6g} at p={summary.max_ratio_p}, "
          f"gauss violations = {summary.violations_gauss}", file=sys.stderr)
    for decade, (p, n) in sorted(summary.decade_max.items()):
        print(f"scan: 10^{decade} <= p < 10^{decade + 1}: max n(p) = {n} at p={p}",
              file=sys.stderr)
    return EXIT_FAIL if summary.violations_gauss else EXIT_OK


def _load_scan_records(path: str) -> list[ScanRecord]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        return [scan_record(int(r["p"]), int(r["n_p"])) for r in reader]


def _threshold_job(args) -> dict:
    p, k_max, budget = args
    rep = threshold_experiment(p, k_max, budget)
    hist = ";".join(f"{v}:{f}" for v, f in sorted(rep.histogram.items()))
    return {"p": rep.p, "k_star": rep.k_star, "windows": rep.p - rep.k_star,
            "census_max": rep.census_max, "census_nonzero": rep.census_nonzero,
            "histogram": hist}


def threshold_primes(config: RunConfig) -> list[int]:
    if config.p is not None:
        return [config.p]
    if config.lo is None or config.hi is None:
        raise UsageError("threshold needs --p or --range A B")
    pool = [m.p for m in odd_primes_in_range(max(config.lo, 5), config.hi,
                                              3 if config.class3_only else None)]
    if config.sample is not None and config.sample < len(pool):
        pool = sorted(random.Random(config.seed).sample(pool, config.sample))
    return pool


def cmd_threshold(config: RunConfig) -> int:
    from .suites import ordered_map

    primes = threshold_primes(config)
    for p in primes:
        if p < 5:
            raise UsageError("threshold needs p >= 5")
        try:
            PrimeModulus(p)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        if ceil_log2(p) > config.k_max:
            raise ResourceError(f"ceil(log2 {p}) exceeds k_max={config.k_max}")
    jobs = [(p, config.k_max, config.memory_budget) for p in primes]
    try:
        rows = list(ordered_map(_threshold_job, jobs, config.threads))
    except BudgetExceeded as exc:
        raise ResourceError(str(exc)) from exc
    emit(config, THRESHOLD_COLUMNS, rows)
    return EXIT_OK


COMMANDS = {
    "census": cmd_census,
    "ap-count": cmd_ap,
    "verify": cmd_verify,
    "scan-nonresidue": cmd_scan,
    "threshold": cmd_threshold,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--threads", type=int, default=None,
                        help="worker processes (default: CPU count)")
    common.add_argument("--memory-budget", type=int, default=DEFAULT_MEMORY_BUDGET,
                        help="character table budget in bytes")
    common.add_argument("--k-max", type=int, default=K_MAX)

    parser = argparse.ArgumentParser(prog="qrpatterns", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    c = sub.add_parser("census", parents=[common], help="pattern census of one prime")
    c.add_argument("--p", type=int, required=True)
    c.add_argument("--k", type=int)
    c.add_argument("--pattern", help="count a single pattern such as rnr")

    a = sub.add_parser("ap-count", parents=[common], help="count k-term progressions")
    a.add_argument("--p", type=int, required=True)
    a.add_argument("--k", type=int, required=True)
    a.add_argument("--d", type=int, required=True)
    a.add_argument("--kind", choices=("residue", "nonresidue"), default="residue")

    v = sub.add_parser("verify", parents=[common], help="run verification suites")
    v.add_argument("--max-p", type=int, required=True, dest="hi")
    v.add_argument("--min-p", type=int, default=3, dest="lo")
    v.add_argument("--suite", choices=SUITES + ("all",), default="all")
    v.add_argument("--suite-k", type=int, default=SUITE_K,
                   help="largest k for the peralta and duality suites")
    v.add_argument("--sample", type=int, help="check a seeded random subset of N primes")
    v.add_argument("--seed", type=int, default=0)

    s = sub.add_parser("scan-nonresidue", parents=[common], help="n(p) over a prime range")
    s.add_argument("--min", type=int, required=True, dest="lo")
    s.add_argument("--max", type=int, required=True, dest="hi")
    s.add_argument("--class3-only", action="store_true")
    s.add_argument("--checkpoint", help="resume file (last completed prime)")

    t = sub.add_parser("threshold", parents=[common], help="census at k = ceil(log2 p)")
    g = t.add_mutually_exclusive_group(required=True)
    g.add_argument("--p", type=int)
    g.add_argument("--range", type=int, nargs=2, metavar=("A", "B"))
    t.add_argument("--sample", type=int)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--class3-only", action="store_true")
    return parser


def parse_config(argv: Optional[Sequence[str]] = None) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    rng = ns.pop("range", None)
    if rng is not None:
        ns["lo"], ns["hi"] = rng
    ns["memory_budget"] = ns.pop("memory_budget")
    if ns.get("threads") is None:
        ns["threads"] = default_threads()
    known = RunConfig.__dataclass_fields__
    return RunConfig(**{k: v for k, v in ns.items() if k in known})


def run(config: RunConfig) -> int:
    try:
        config.validate()
        return COMMANDS[config.subcommand](config)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ResourceError, BudgetExceeded, MemoryError) as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        config = parse_config(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
