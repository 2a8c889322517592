"""Command-line interface: solve, verify, and position subcommands."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from .config import parse_config
from .errors import BladekitError
from .geometry import contour_from_csv
from .pipeline import run_pipeline, write_artifacts
from .positioning import (
    NodePartition,
    least_squares_shift,
    maximize_lift,
    minimize_area_shift,
)

log = logging.getLogger("bladekit")


def _setup_logging():
    level = os.environ.get("BLADE_LOG", "info").lower()
    mapping = {"debug": logging.DEBUG, "info": logging.INFO,
               "quiet": logging.CRITICAL}
    logging.basicConfig(level=mapping.get(level, logging.INFO),
                        format="%(levelname)s %(message)s")


def _print_report(report):
    for sec in report.sections:
        for check in sec.checks:
            if check.passed is None:
                verdict = "INFO"
            else:
                verdict = "PASS" if check.passed else "FAIL"
            tol = "-" if check.tolerance is None else f"{check.tolerance:g}"
            log.info("%s %s/%s value=%.3e tol=%s", verdict, sec.id,
                     check.name, check.value, tol)
    for err in report.errors:
        log.error("section error: %s", err)
    log.info("overall: %s (%.2f s)",
             "PASS" if report.passed else "FAIL", report.timing_seconds)


def _cmd_solve(args) -> int:
    cfg = parse_config(args.config)
    report = run_pipeline(cfg)
    out_dir = args.out or cfg.output.directory
    written = write_artifacts(cfg, report, out_dir)
    for path in written:
        log.debug("wrote %s", path)
    _print_report(report)
    return 0 if report.passed else 1


def _cmd_verify(args) -> int:
    cfg = parse_config(args.config)
    report = run_pipeline(cfg)
    _print_report(report)
    return 0 if report.passed else 1


def _cmd_position(args) -> int:
    contours = []
    velocities = []
    for path in args.contours:
        with open(path, "r", encoding="utf-8") as fh:
            contour, vel = contour_from_csv(fh.read())
        contours.append(contour)
        velocities.append(vel)
    c1, c2 = contours
    if args.method == "lsq":
        shift = least_squares_shift(c1, c2)
    elif args.method == "area":
        seed = least_squares_shift(c1, c2)
        shift = minimize_area_shift(c1, c2, args.spacing, (seed.dx, seed.dy))
    else:
        if args.box is None:
            raise BladekitError("--box is required for the lift method")
        if args.partition is None:
            raise BladekitError("--partition is required for the lift method")
        v1, v2 = velocities
        if v1 is None or v2 is None:
            raise BladekitError(
                "lift positioning needs a 'v' column in both contour files"
            )
        part = NodePartition(args.partition, np.abs(v1), np.abs(v2))
        shift = maximize_lift(c1, c2, part, tuple(args.box))
    text = json.dumps(shift.to_json(), sort_keys=True, indent=2)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blade",
        description="Inverse blade-section design with transversal-velocity splines",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="run the design pipeline and write artifacts")
    p_solve.add_argument("--config", required=True, help="design configuration JSON")
    p_solve.add_argument("--out", default=None, help="output directory (overrides config)")
    p_solve.set_defaults(func=_cmd_solve)

    p_verify = sub.add_parser("verify", help="run the pipeline checks without artifacts")
    p_verify.add_argument("--config", required=True)
    p_verify.set_defaults(func=_cmd_verify)

    p_pos = sub.add_parser("position", help="position two contours from CSV files")
    p_pos.add_argument("--contours", nargs=2, required=True, metavar=("A", "B"))
    p_pos.add_argument("--method", choices=("lsq", "area", "lift"), default="lsq")
    p_pos.add_argument("--box", nargs=4, type=float, default=None,
                       metavar=("X0", "Y0", "X1", "Y1"))
    p_pos.add_argument("--partition", type=int, default=None)
    p_pos.add_argument("--spacing", type=float, default=1.0)
    p_pos.add_argument("--out", default=None, help="write the shift JSON here")
    p_pos.set_defaults(func=_cmd_position)
    return parser


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BladekitError as exc:
        log.error("%s", exc)
        return 2
    except OSError as exc:
        log.error("%s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
