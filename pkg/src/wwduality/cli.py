"""Command-line front end: ``scan``, ``point`` and ``verify``.

Exit codes: 0 success, 1 I/O failure, 2 usage error, 3 verification failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import time
from dataclasses import asdict, fields
from typing import Iterable, Optional, Sequence

from .errors import InvalidArgumentError
from .interferometer import QuantonOutcome
from .optimizer import ScanConfig, ScanRecord, evaluate_cell, resolve_threads, run_scan
from .whichway import duality_residual

EXIT_OK, EXIT_IO, EXIT_USAGE, EXIT_VERIFY = 0, 1, 2, 3

COLUMNS = [f.name for f in fields(ScanRecord)]


def format_value(x) -> str:
    if x is None:
        return ""
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".17g")


def records_to_csv(records: Iterable[ScanRecord], extra: Optional[dict] = None) -> str:
    """CSV text with a fixed column order; absent values are empty fields."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    extra = extra or {}
    writer.writerow(COLUMNS + list(extra))
    for r in records:
        row = [format_value(getattr(r, c)) for c in COLUMNS]
        writer.writerow(row + [format_value(v) for v in extra.values()])
    return buf.getvalue()


def records_to_json(records: Iterable[ScanRecord], extra: Optional[dict] = None) -> str:
    rows = [{**asdict(r), **(extra or {})} for r in records]
    return json.dumps(rows, indent=1) + "\n"


def parse_csv(text: str) -> list[ScanRecord]:
    """Inverse of :func:`records_to_csv` (extra columns are ignored)."""
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        vals = {}
        for c in COLUMNS:
            raw = row[c]
            if c == "sigma":
                vals[c] = int(raw)
            else:
                vals[c] = None if raw == "" else float(raw)
        out.append(ScanRecord(**vals))
    return out


def _visibility_list(text: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty visibility list")
    for v in vals:
        if not 0.0 <= v <= 1.0:
            raise argparse.ArgumentTypeError(f"visibility {v} outside [0, 1]")
    return vals


def _sigma(text: str) -> QuantonOutcome:
    try:
        return QuantonOutcome.parse(text)
    except InvalidArgumentError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {n}")
    return n


def _seed(text: str) -> int:
    try:
        n = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= n < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer: {n}")
    return n


def _threads(text: str):
    if text == "auto":
        return "auto"
    return _positive_int(text)


def _finite(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(x):
        raise argparse.ArgumentTypeError(f"must be finite: {text!r}")
    return x


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wwduality",
        description="Which-way distinguishability vs. visibility for both readout orders.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, seed_default=42):
        p.add_argument("--samples", type=_positive_int, default=10_000, help="random bases per cell")
        p.add_argument("--sigma", type=_sigma, default=QuantonOutcome.A, help="quanton outcome, +1 or -1")
        p.add_argument("--seed", type=_seed, default=seed_default, help="master seed (u64)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        p.add_argument("--no-refine", dest="refine", action="store_false",
                       help="plain random search, no local polish")

    scan = sub.add_parser("scan", help="sweep delta for one or more visibilities")
    scan.add_argument("--visibility", type=_visibility_list, default=(0.5, 0.9, 0.97))
    scan.add_argument("--delta-steps", type=_positive_int, default=50)
    scan.add_argument("--threads", type=_threads, default=1, help="worker threads or 'auto'")
    common(scan)

    point = sub.add_parser("point", help="evaluate a single (V, delta, sigma) cell")
    point.add_argument("--visibility", type=_visibility_list, required=True)
    point.add_argument("--delta", type=_finite, required=True, help="phase in radians")
    common(point)

    verify = sub.add_parser("verify", help="run the invariant suite")
    verify.add_argument("--tolerance", type=float, default=None,
                        help="override the tolerance of the Monte Carlo checks")
    verify.add_argument("--seed", type=_seed, default=42)
    return parser


def _emit(text: str, path: Optional[str]) -> int:
    try:
        if path is None or path == "-":
            sys.stdout.write(text)
            sys.stdout.flush()
        else:
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
    except OSError as exc:
        print(f"wwduality: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def cmd_scan(args) -> int:
    config = ScanConfig(args.visibility, args.delta_steps, args.samples, args.sigma, args.seed, args.refine)
    resolve_threads(args.threads)
    t0 = time.perf_counter()
    records = run_scan(config, threads=args.threads)
    logging.getLogger(__name__).info("scan finished in %.1f s", time.perf_counter() - t0)
    text = records_to_csv(records) if args.format == "csv" else records_to_json(records)
    return _emit(text, args.out)


def cmd_point(args) -> int:
    if len(args.visibility) != 1:
        raise InvalidArgumentError("point takes a single --visibility value")
    v = args.visibility[0]
    rec = evaluate_cell(v, args.delta, args.sigma, args.samples, args.seed, refine=args.refine)
    residual = None if rec.d_opt is None else duality_residual(rec.d_opt, v)
    extra = {"duality_residual": residual}
    text = records_to_csv([rec], extra) if args.format == "csv" else records_to_json([rec], extra)
    return _emit(text, args.out)


def cmd_verify(args) -> int:
    from .verification import run_checks

    results = run_checks(seed=args.seed, mc_tolerance=args.tolerance)
    width = max(len(r.name) for r in results)
    print(f"{'check':<{width}}  {'residual':>10}  {'tolerance':>9}  result")
    for r in results:
        tag = "PASS" if r.passed else "FAIL"
        mc = " (MC)" if r.monte_carlo else ""
        print(f"{r.name:<{width}}  {r.residual:10.3e}  {r.tolerance:9.1e}  {tag}{mc}")
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_VERIFY


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"scan": cmd_scan, "point": cmd_point, "verify": cmd_verify}[args.command]
    try:
        return handler(args)
    except InvalidArgumentError as exc:
        print(f"wwduality: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
