"""``widthlab`` command line entry point."""

import argparse
import dataclasses
import os
import sys

from ..errors import ConfigError, InvariantViolation
from . import report
from .config import load_config, validate
from .sweep import (approx_table, cover_table, fit_rate, run_sweep,
                    sobolev_records, sobolev_table)
from .verify import verify_theorem1

EXIT_OK, EXIT_CONFIG, EXIT_INVARIANT = 0, 1, 2

COVER_COLUMNS = ("epsilon", "size", "certified", "max_residual", "bound_value",
                 "bound_satisfied", "packing_size", "packing_2eps_size",
                 "sandwich_ok")
APPROX_COLUMNS = ("n", "epsilon_used", "convex_error", "linear_error")
SOBOLEV_COLUMNS = ("n", "r", "analytic_width", "linear_error", "convex_error",
                   "extremal_mass", "Lambda", "precondition_met")


def _plot(cfg, name, series, exponent, title):
    from .plotting import rate_plot
    return rate_plot(os.path.join(cfg.output.dir, f"{name}.svg"), series,
                     title, exponent)


def cmd_sweep(cfg, jobs):
    result = run_sweep(cfg, jobs)
    out = cfg.output
    stem = os.path.join(out.dir, "sweep")
    written = [report.write_table(stem, report.SWEEP_COLUMNS,
                                  report.sweep_rows(result.records, out.wall_time),
                                  out.format)]
    written.append(report.write_text(stem + "_fit.json", report.json_text(
        {"fits": result.fits, "meta": result.meta})))
    if out.wall_time:
        written.append(report.write_text(stem + "_timing.json", report.json_text(
            {str(r.n): r.wall_time for r in result.records})))
    if out.svg:
        fit = result.fits.get("epsilon_used")
        written.append(_plot(cfg, "sweep", {
            "measured_error": ([r.n for r in result.records],
                               [r.measured_error for r in result.records]),
            "epsilon_used": ([r.n for r in result.records],
                             [r.epsilon_used for r in result.records]),
        }, fit.theoretical_exponent if fit else None, cfg.name))
    return written, EXIT_OK


def cmd_cover(cfg, jobs):
    rows = cover_table(cfg)
    path = report.write_table(os.path.join(cfg.output.dir, "cover"),
                              COVER_COLUMNS, rows, cfg.output.format)
    ok = all(r["sandwich_ok"] and r["bound_satisfied"] is not False for r in rows)
    return [path], EXIT_OK if ok else EXIT_INVARIANT


def cmd_approx(cfg, jobs):
    rows = approx_table(cfg, jobs)
    path = report.write_table(os.path.join(cfg.output.dir, "approx"),
                              APPROX_COLUMNS, rows, cfg.output.format)
    written = [path]
    if cfg.output.svg:
        written.append(_plot(cfg, "approx", {
            "convex": ([r["n"] for r in rows], [r["convex_error"] for r in rows]),
            "linear": ([r["n"] for r in rows], [r["linear_error"] for r in rows]),
        }, None, cfg.name))
    return written, EXIT_OK


def cmd_sobolev(cfg, jobs):
    rows, extremal = sobolev_table(cfg, jobs)
    d = cfg.output.dir
    written = [report.write_table(os.path.join(d, "sobolev"), SOBOLEV_COLUMNS,
                                  rows, cfg.output.format)]
    if extremal is not None:
        written.append(report.write_text(os.path.join(d, "extremal_mass.json"),
                                         report.json_text(extremal)))
    try:
        fit = fit_rate(sobolev_records(rows), -float(cfg.sobolev.r)).to_dict()
    except ValueError as exc:
        fit = {"note": str(exc)}
    written.append(report.write_text(os.path.join(d, "sobolev_fit.json"),
                                     report.json_text(fit)))
    if cfg.output.svg:
        written.append(_plot(cfg, "sobolev", {
            "convex": ([r["n"] for r in rows], [r["convex_error"] for r in rows]),
            "linear": ([r["n"] for r in rows], [r["linear_error"] for r in rows]),
        }, None, cfg.name))
    return written, EXIT_OK


def cmd_verify(cfg, jobs):
    rep = verify_theorem1(cfg)
    path = report.write_text(os.path.join(cfg.output.dir, "verify.json"),
                             report.json_text(rep))
    return [path], EXIT_OK if rep["passed"] else EXIT_INVARIANT


COMMANDS = {"cover": cmd_cover, "approx": cmd_approx, "sweep": cmd_sweep,
            "sobolev": cmd_sobolev, "verify": cmd_verify}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="JSON experiment config")
    common.add_argument("--out", help="output directory (overrides output.dir)")
    common.add_argument("--seed", type=int, help="master seed (overrides seed)")
    common.add_argument("--format", choices=("csv", "json"),
                        help="table format (overrides output.format)")
    common.add_argument("--jobs", type=int, default=1,
                        help="worker threads for sweep cells")
    common.add_argument("--svg", action="store_true",
                        help="also write a log-log rate plot")
    common.add_argument("--wall-time", action="store_true",
                        help="write measured wall times into the CSV")
    parser = argparse.ArgumentParser(
        prog="widthlab", description="Convex n-width experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def _apply_overrides(cfg, args):
    out = cfg.output
    cfg = dataclasses.replace(cfg, output=dataclasses.replace(
        out, dir=args.out or out.dir, format=args.format or out.format,
        svg=out.svg or args.svg, wall_time=out.wall_time or args.wall_time))
    if args.seed is not None:
        if not 0 <= args.seed < 2 ** 64:
            raise ConfigError("--seed must be an unsigned 64-bit integer")
        cfg = dataclasses.replace(cfg, seed=args.seed)
    if args.jobs < 1:
        raise ConfigError("--jobs must be positive")
    return validate(cfg)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = _apply_overrides(load_config(args.config), args)
        os.makedirs(cfg.output.dir, exist_ok=True)
        written, code = COMMANDS[args.command](cfg, args.jobs)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    for path in written:
        print(path)
    if code != EXIT_OK:
        print("checks failed", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
