"""Command-line front end: ``entropic-cv <command> [options]``.

Exit codes: 0 finished without detection, 3 finished and certified
entanglement, 1 usage error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import re
import sys
import time

import numpy as np

from . import __version__
from .criteria import CRITERIA
from .errors import EntropicCVError, InvalidInputError
from .experiments import (CAT_COLUMNS, ETA_COLUMNS, PAPER_TABLE_ROWS, TABLE_COLUMNS, cat_surface,
                          default_jobs, eta_scan, random_table, run_state_test, write_table)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_ENTANGLED = 3

UNITS_NOTE = "Angles are in radians, entropies in nats (hbar = 1, vacuum variance 1/2)."


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_angle(text: str) -> float:
    """Accept plain floats or ``pi``, ``pi/4``, ``3*pi/4`` style expressions."""
    t = text.replace(" ", "").lower()
    m = re.fullmatch(r"(?:([0-9.]+)\*?)?pi(?:/([0-9.]+))?", t)
    if m:
        num = float(m.group(1)) if m.group(1) else 1.0
        den = float(m.group(2)) if m.group(2) else 1.0
        return num * math.pi / den
    try:
        return float(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an angle: {text!r}") from None


def parse_floats(text: str) -> list:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None


def parse_range(text: str) -> tuple:
    vals = parse_floats(text)
    if len(vals) != 2 or vals[0] > vals[1]:
        raise argparse.ArgumentTypeError(f"expected 'lo,hi' with lo <= hi, got {text!r}")
    return vals[0], vals[1]


def parse_rows(text: str) -> list:
    """``2:6000,3:1600`` -> [(2, 6000), (3, 1600)]."""
    rows = []
    for item in text.split(","):
        d, _, n = item.partition(":")
        try:
            rows.append((int(d), int(n)))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad row {item!r}; expected D:count") from None
    return rows


def _common(p: argparse.ArgumentParser, points_default=1024):
    p.add_argument("--grid-points", type=int, default=points_default,
                   help=f"grid points per axis (default {points_default})")
    p.add_argument("--grid-span", type=float, default=None,
                   help="grid half-width; default chosen from the state")
    p.add_argument("--jobs", type=int, default=default_jobs(),
                   help="worker processes (default from ENTROPIC_CV_JOBS, else 1)")
    p.add_argument("--out", required=True, help="output file")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="entropic-cv", description=__doc__.splitlines()[0],
                     epilog=UNITS_NOTE)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    st = sub.add_parser("state-test", help="scan one state with the separability tests",
                        epilog=UNITS_NOTE)
    st.add_argument("state", help="e.g. noon:N=3, phi, eta:sp=1,sm=0.5, cat:alpha=1,p=0, "
                                  "tmsv:r=0.5, random:D=2,seed=7")
    st.add_argument("--criteria", default=",".join(CRITERIA),
                    help="comma list from strong,weak,mgvt,simon (default all)")
    st.add_argument("--theta-step", type=parse_angle, default=math.pi / 4,
                    help="angle step in radians, must divide pi (default pi/4)")
    st.add_argument("--a-values", type=parse_floats, default=[1.0],
                    help="local squeezing weights, comma list (default 1)")
    _common(st)

    es = sub.add_parser("eta-scan", help="detection bands of the eta state versus sigma-/sigma+",
                        epilog=UNITS_NOTE)
    es.add_argument("--ratio-range", type=parse_range, default=(0.2, 3.0))
    es.add_argument("--steps", type=int, default=57)
    _common(es)

    rt = sub.add_parser("random-table", help="detection rates for Haar-random states",
                        epilog=UNITS_NOTE + " D counts Fock levels per mode (n, m = 0..D-1).")
    rt.add_argument("--rows", type=parse_rows, default=list(PAPER_TABLE_ROWS),
                    help="D:count pairs (default 2:6000,3:1600,4:800,5:720,7:120)")
    rt.add_argument("--seed", type=int, default=2009)
    rt.add_argument("--theta-step", type=parse_angle, default=math.pi / 4)
    _common(rt)

    cs = sub.add_parser("cat-surface", help="weak-test LHS - RHS for dephased cat states",
                        epilog=UNITS_NOTE)
    cs.add_argument("--alpha-range", type=parse_range, default=(0.0, 2.5))
    cs.add_argument("--alpha-steps", type=int, default=26)
    cs.add_argument("--p-range", type=parse_range, default=(0.0, 1.0))
    cs.add_argument("--p-steps", type=int, default=11)
    cs.add_argument("--parity", type=int, choices=(1, -1), default=1,
                    help="+1: p = 0 is the even cat (default); -1: the odd cat")
    _common(cs)
    return parser


def _state_test(args) -> int:
    criteria = [c.strip() for c in args.criteria.split(",") if c.strip()]
    bad = set(criteria) - set(CRITERIA)
    if bad:
        raise UsageError(f"unknown criteria: {', '.join(sorted(bad))}")
    record = run_state_test(args.state, criteria, theta_step=args.theta_step,
                            a_values=args.a_values, points=args.grid_points, span=args.grid_span)
    record.save(args.out)
    for r in record.reports:
        print(f"{r['criterion']:>6}: margin={r['margin']:+.6f} violated={r['violated']}")
    if record.entangled:
        return EXIT_ENTANGLED
    missing = set(record.settings["criteria"]) - {r["criterion"] for r in record.reports}
    if missing:
        # every setting failed for these criteria, so "not entangled" would be unfounded
        first = record.errors[0]["message"] if record.errors else "no evaluations"
        print(f"entropic-cv: numerical failure for {', '.join(sorted(missing))}: {first}",
              file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def _eta_scan(args) -> int:
    lo, hi = args.ratio_range
    if lo <= 0:
        raise UsageError("ratio bounds must be positive")
    ratios = np.linspace(lo, hi, args.steps)
    start = time.perf_counter()
    rows = eta_scan(ratios, points=args.grid_points, jobs=args.jobs)
    write_table(args.out, ETA_COLUMNS, rows, {
        "command": "eta-scan", "sigma_plus": 1.0, "grid_points": args.grid_points,
        "theta1": 0.0, "theta2": 0.0, "wall_time": time.perf_counter() - start})
    return EXIT_OK


def _random_table(args) -> int:
    start = time.perf_counter()
    rows = random_table(args.rows, seed=args.seed, theta_step=args.theta_step,
                        points=args.grid_points, jobs=args.jobs)
    write_table(args.out, TABLE_COLUMNS, rows, {
        "command": "random-table", "seed": args.seed, "theta_step": args.theta_step,
        "grid_points": args.grid_points, "wall_time": time.perf_counter() - start})
    for r in rows:
        print(f"D={r['D']} ({r['states']} states): strong {r['n_strong']:.1f}%  "
              f"weak {r['n_weak']:.1f}%  MGVT {r['n_mgvt']:.1f}%")
    return EXIT_OK


def _cat_surface(args) -> int:
    alphas = np.linspace(*args.alpha_range, args.alpha_steps)
    ps = np.linspace(*args.p_range, args.p_steps)
    if args.p_range[0] < 0 or args.p_range[1] > 1:
        raise UsageError("p range must lie within [0, 1]")
    start = time.perf_counter()
    rows = cat_surface(alphas, ps, points=args.grid_points, parity=args.parity, jobs=args.jobs)
    write_table(args.out, CAT_COLUMNS, rows, {
        "command": "cat-surface", "pairing": "R-,S+", "theta1": 0.0, "theta2": 0.0,
        "parity": args.parity, "grid_points": args.grid_points,
        "wall_time": time.perf_counter() - start})
    return EXIT_OK


_COMMANDS = {"state-test": _state_test, "eta-scan": _eta_scan,
             "random-table": _random_table, "cat-surface": _cat_surface}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except (UsageError, InvalidInputError) as exc:
        print(f"entropic-cv: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EntropicCVError as exc:
        print(f"entropic-cv: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
