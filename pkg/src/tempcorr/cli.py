"""Command-line front end.

Commands reproduce the scan and threshold artifacts as CSV/JSON files and
run the verification suites. Exit codes distinguish regression classes:

    0  success
    2  invalid configuration
    3  output write failure
    4  a threshold report exceeded its tolerance
    5  a verification suite failed

CSV output uses 17 significant digits, '.' decimals, and '\\n' line endings;
files are byte-identical for identical configuration (including --seed).
TEMPCORR_THREADS caps scan parallelism (default: machine parallelism).
TEMPCORR_TOL_SCALE rescales gate tolerances; it exists so the failure
paths (exit 4/5) can be exercised by tests.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import scenarios
from .ineq import VIOLATION_MARGIN
from .oracle import OracleReport, damping_rk4_suite, equivalence_suite
from .scenarios import (
    ScanRecord,
    interior_grid,
    k4_crossing_gamma,
    k5_mapped,
    k6_mapped,
    lgi_threshold_report,
    spinj_k4_max,
    steering_threshold_report,
    theorem2_corollary_check,
    unsharp_steering_scenario,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_THRESHOLD = 4
EXIT_VERIFY = 5

TWO_ROOT_TWO = 2.0 * math.sqrt(2.0)


@dataclass
class RunConfig:
    command: str
    grid_points: int = 200
    omega_dt: float = math.pi / 4
    gamma_range: tuple[float, float] = (0.0, 2.0)
    eta: float = 0.7
    output_path: str | None = None
    format: str = "csv"
    seed: int = 0
    suite: str | None = None

    def validation_error(self) -> str | None:
        if self.grid_points < 2:
            return "grid_points must be ≥ 2"
        if self.gamma_range[0] > self.gamma_range[1]:
            return "gamma range must satisfy min <= max"
        if self.gamma_range[0] < 0:
            return "gamma range must be nonnegative"
        if not 0.0 < self.eta <= 1.0:
            return "eta must lie in (0, 1]"
        if self.format not in ("csv", "json"):
            return "format must be csv or json"
        return None

    @property
    def default_output(self) -> str:
        return f"{self.command}.{'json' if self.format == 'json' else 'csv'}"


def _tol_scale() -> float:
    return float(os.environ.get("TEMPCORR_TOL_SCALE", "1"))


def _thread_count() -> int:
    raw = os.environ.get("TEMPCORR_THREADS", "").strip()
    if raw:
        return max(1, int(raw))
    return os.cpu_count() or 1


def _parallel_map(fn: Callable, items: Iterable) -> list:
    """Map preserving input order; workers capped by TEMPCORR_THREADS."""
    items = list(items)
    workers = min(_thread_count(), len(items)) or 1
    if workers <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _fmt(value: float) -> str:
    return f"{float(value):.17g}"


def _render_rows(header: Sequence[str], rows: Sequence[Sequence[float]], fmt: str) -> str:
    if fmt == "json":
        payload = [dict(zip(header, (float(v) for v in row))) for row in rows]
        return json.dumps(payload, indent=2) + "\n"
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _write_text(path: str, text: str) -> str | None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        return f"cannot write {path}: {exc}"
    return None


def _scan_rows(records: Sequence[ScanRecord], columns: Sequence[str]) -> list[list[float]]:
    return [[rec.parameter] + [rec.columns[c] for c in columns] for rec in records]


def cmd_fig2(cfg: RunConfig) -> int:
    columns = ["S_analytic", "Sprime_analytic", "S_simulated", "Sprime_simulated", "max_violation_margin"]
    grid = interior_grid(cfg.grid_points)
    records = _parallel_map(lambda x: scenarios.fig2_scan([x])[0], grid)
    out = cfg.output_path or cfg.default_output
    err = _write_text(out, _render_rows(["x"] + columns, _scan_rows(records, columns), cfg.format))
    if err:
        print(err, file=sys.stderr)
        return EXIT_IO
    print(f"wrote {out} ({len(records)} rows)")
    return EXIT_OK


def cmd_fig3(cfg: RunConfig) -> int:
    columns = ["K4_minus_2_paper", "S2_minus_1_paper", "K4_minus_2_simulated", "S2_minus_1_simulated"]
    lo, hi = cfg.gamma_range
    grid = np.linspace(lo, hi, cfg.grid_points)
    records = _parallel_map(lambda g: scenarios.fig3_scan([g], omega_dt=cfg.omega_dt)[0], grid)
    out = cfg.output_path or cfg.default_output
    err = _write_text(out, _render_rows(["gamma_dt"] + columns, _scan_rows(records, columns), cfg.format))
    if err:
        print(err, file=sys.stderr)
        return EXIT_IO

    def crossing(simulated: bool) -> float | None:
        try:
            return k4_crossing_gamma(cfg.omega_dt, xtol=1e-8, simulated=simulated)
        except ValueError:
            return None

    sidecar = {
        "omega_dt": cfg.omega_dt,
        "K4_crossing_paper_formula": crossing(False),
        "K4_crossing_simulated": crossing(True),
        "bisection_tolerance": 1e-8,
    }
    err = _write_text(out + ".json", json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    if err:
        print(err, file=sys.stderr)
        return EXIT_IO
    print(f"wrote {out} ({len(records)} rows) and {out}.json")
    return EXIT_OK


def threshold_reports(tolerance: float = 1e-4) -> list:
    reports = [steering_threshold_report(tolerance)]
    reports.extend(lgi_threshold_report(n, tolerance) for n in range(4, 9))
    return reports


def cmd_thresholds(cfg: RunConfig) -> int:
    reports = threshold_reports(1e-4 * _tol_scale())
    payload = [
        {
            "name": r.name,
            "formula_value": r.formula_value,
            "simulated_value": r.simulated_value,
            "abs_diff": r.abs_diff,
            "tolerance": r.tolerance,
            "passed": r.passed,
        }
        for r in reports
    ]
    out = cfg.output_path or "thresholds.json"
    err = _write_text(out, json.dumps(payload, indent=2) + "\n")
    if err:
        print(err, file=sys.stderr)
        return EXIT_IO
    for r in reports:
        status = "ok" if r.passed else "EXCEEDS TOLERANCE"
        print(f"{r.name}: formula {r.formula_value:.7f} vs bisection {r.simulated_value:.7f} [{status}]")
    if not all(r.passed for r in reports):
        print("threshold gate failed", file=sys.stderr)
        return EXIT_THRESHOLD
    print(f"wrote {out}")
    return EXIT_OK


def cmd_hierarchy(cfg: RunConfig) -> int:
    columns = ["S3", "K5", "K6", "S3_violated", "K5_violated", "K6_violated", "steering_without_lgi"]
    etas = np.linspace(0.0, 1.0, cfg.grid_points + 1)[1:]

    def row(eta: float) -> list[float]:
        s3 = unsharp_steering_scenario(float(eta), cfg.omega_dt)
        k5 = k5_mapped(float(eta))
        k6 = k6_mapped(float(eta))
        window = s3.violated and not k5.violated and not k6.violated
        return [float(eta), s3.value, k5.value, k6.value,
                float(s3.violated), float(k5.violated), float(k6.violated), float(window)]

    rows = _parallel_map(row, etas)
    out = cfg.output_path or cfg.default_output
    err = _write_text(out, _render_rows(["eta"] + columns, rows, cfg.format))
    if err:
        print(err, file=sys.stderr)
        return EXIT_IO
    print(f"wrote {out} ({len(rows)} rows)")
    return EXIT_OK


def _suite_oracle(cfg: RunConfig, scale: float) -> tuple[list[str], OracleReport | None]:
    reports = equivalence_suite(200, seed=cfg.seed)
    bad = [r for r in reports if r.abs_diff > r.tolerance * scale]
    lines = [f"{len(reports)} joint-probability comparisons, max |diff| = "
             f"{max(r.abs_diff for r in reports):.3e}"]
    return lines, (bad[0] if bad else None)


def _suite_rk4(cfg: RunConfig, scale: float) -> tuple[list[str], OracleReport | None]:
    reports = damping_rk4_suite(50, seed=cfg.seed + 1)
    bad = [r for r in reports if r.abs_diff > r.tolerance * scale]
    lines = [f"{len(reports)} Kraus-vs-RK4 draws, max |diff| = {max(r.abs_diff for r in reports):.3e}"]
    return lines, (bad[0] if bad else None)


def _suite_theorem2(cfg: RunConfig, scale: float, verbose: bool) -> tuple[list[str], OracleReport | None]:
    report = theorem2_corollary_check(interior_grid(cfg.grid_points))
    lines = []
    if verbose:
        lines.append("x,lgi_value,lgi_ordering,lgi_violated,S,Sprime,steering_violated")
        for r in report.rows:
            ordering = "".join(str(k + 1) for k in r.lgi_ordering)
            lines.append(
                f"{_fmt(r.x)},{_fmt(r.lgi_value)},{ordering},{int(r.lgi_violated)},"
                f"{_fmt(r.steering_s)},{_fmt(r.steering_sprime)},{int(r.steering_violated)}"
            )
    lines.append(f"{len(report.rows)} grid points, all violated: {report.all_violated}")
    first_bad = next((r for r in report.rows if not r.ok), None)
    failing = None
    if first_bad is not None:
        margin = max(first_bad.lgi_value - 2.0, -2.0 - first_bad.lgi_value)
        achieved = min(margin, max(first_bad.steering_s, first_bad.steering_sprime) - 2.0)
        failing = OracleReport(
            quantity=f"theorem2.x={first_bad.x:.9f}",
            analytic=VIOLATION_MARGIN,
            oracle=achieved,
            abs_diff=VIOLATION_MARGIN - achieved,
            tolerance=0.0,
        )
    return lines, failing


def _suite_spinj(cfg: RunConfig, scale: float) -> tuple[list[str], OracleReport | None]:
    lines = []
    failing = None
    for dim in (2, 4, 8):
        _, value = spinj_k4_max(dim)
        diff = abs(value - TWO_ROOT_TWO)
        lines.append(f"dim {dim}: K4 max = {value:.9f} (|diff from 2*sqrt(2)| = {diff:.2e})")
        if failing is None and diff > 1e-6 * scale:
            failing = OracleReport(
                quantity=f"spinj.dim{dim}.k4max",
                analytic=TWO_ROOT_TWO,
                oracle=value,
                abs_diff=diff,
                tolerance=1e-6 * scale,
            )
    return lines, failing


def cmd_verify(cfg: RunConfig) -> int:
    scale = _tol_scale()
    suites: list[tuple[str, Callable[[], tuple[list[str], OracleReport | None]]]] = [
        ("oracle", lambda: _suite_oracle(cfg, scale)),
        ("rk4", lambda: _suite_rk4(cfg, scale)),
        ("theorem2", lambda: _suite_theorem2(cfg, scale, verbose=cfg.suite == "theorem2")),
        ("spinj", lambda: _suite_spinj(cfg, scale)),
    ]
    if cfg.suite:
        suites = [(name, fn) for name, fn in suites if name == cfg.suite]
        if not suites:
            print(f"unknown suite {cfg.suite!r}", file=sys.stderr)
            return EXIT_CONFIG
    first_failure = None
    for name, fn in suites:
        lines, failing = fn()
        for line in lines:
            print(line)
        print(f"{name}: {'FAIL' if failing else 'PASS'}")
        if failing and first_failure is None:
            first_failure = failing
    if first_failure is not None:
        print(json.dumps(dataclasses.asdict(first_failure)), file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tempcorr",
        description="Temporal-correlation inequality scans for sequential measurements on a single system",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, points: int, omega_dt: float) -> None:
        p.add_argument("--points", type=int, default=points, dest="grid_points")
        p.add_argument("--omega-dt", type=float, default=omega_dt, dest="omega_dt")
        p.add_argument("--gamma-min", type=float, default=0.0)
        p.add_argument("--gamma-max", type=float, default=2.0)
        p.add_argument("--eta", type=float, default=0.7)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("-o", "--output", default=None, dest="output_path")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    common(sub.add_parser("fig2", help="steering sums vs the timing parameter"), 200, math.pi / 4)
    common(sub.add_parser("fig3", help="damped LG and steering sums vs gamma*dt"), 200, math.pi / 4)
    common(sub.add_parser("thresholds", help="sharpness thresholds: formula vs bisection"), 200, math.pi / 4)
    common(sub.add_parser("hierarchy", help="eta scan of K5/K6/S3 and the steering-only window"), 200, 0.0)
    verify = sub.add_parser("verify", help="run the oracle/property verification suites")
    common(verify, 500, math.pi / 4)
    verify.add_argument("--suite", choices=("oracle", "rk4", "theorem2", "spinj"), default=None)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage, 0 on --help; keep its codes.
        return int(exc.code or 0)
    cfg = RunConfig(
        command=args.command,
        grid_points=args.grid_points,
        omega_dt=args.omega_dt,
        gamma_range=(args.gamma_min, args.gamma_max),
        eta=args.eta,
        output_path=args.output_path,
        format=args.format,
        seed=args.seed,
        suite=getattr(args, "suite", None),
    )
    error = cfg.validation_error()
    if error:
        print(error, file=sys.stderr)
        return EXIT_CONFIG
    handlers = {
        "fig2": cmd_fig2,
        "fig3": cmd_fig3,
        "thresholds": cmd_thresholds,
        "hierarchy": cmd_hierarchy,
        "verify": cmd_verify,
    }
    return handlers[cfg.command](cfg)


if __name__ == "__main__":
    sys.exit(main())
