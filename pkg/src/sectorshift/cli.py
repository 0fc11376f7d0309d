"""Command line front end.

Subcommands: fit (ingest + batch fit + results file), collapse (master-curve
coordinates from a results file), simulate (closed-form or integrated
trajectories), correlate (agrarian share vs an auxiliary indicator) and
classify (transfer-type lookup).  Exit codes: 0 success, 1 when a fit run
completes but accepts nothing, 2 for usage, I/O or parse problems.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys

import numpy as np

from . import ingest
from .model import (
    ModelParams,
    SectorShares,
    UnclassifiableParamsError,
    classify,
    shares_curve,
)
from .numerics import DegenerateDataError, pearson_r, quartile_stats, rk4_integrate
from .pipeline import FitConfig, collapse_points_for, fit_all

__all__ = ["build_parser", "main", "entrypoint"]


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 2


def _add_output_flags(parser: argparse.ArgumentParser, default_out: str | None) -> None:
    parser.add_argument("--out", default=default_out, help=f"output path (default: {default_out or 'stdout'})")
    parser.add_argument(
        "--format",
        choices=("csv", "json"),
        default=None,
        help="output format; default follows the --out extension",
    )


def _add_cleaning_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--cutoff-year", type=int, default=1995, help="drop excluded countries' years before this (default 1995)")
    parser.add_argument("--exclusions", default=None, help="exclusion-list file; default: packaged list")
    parser.add_argument("--min-years", type=int, default=4, help="minimum usable years per country (default 4)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sectorshift",
        description="Fit and analyze the three-sector GDP composition transfer model.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_fit = sub.add_parser("fit", help="fit every eligible country in the indicator file(s)")
    p_fit.add_argument("inputs", nargs="+", help="indicator CSV file(s), wide or long layout")
    p_fit.add_argument("--seed", type=int, default=42, help="global random seed (default 42)")
    p_fit.add_argument("--threshold", type=float, default=0.1, help="acceptance threshold on summed MSE (default 0.1)")
    p_fit.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="parallel country fits (default: all processors)")
    _add_cleaning_flags(p_fit)
    _add_output_flags(p_fit, "results.csv")
    p_fit.set_defaults(func=cmd_fit)

    p_col = sub.add_parser("collapse", help="map observations onto the master curve using fitted parameters")
    p_col.add_argument("inputs", nargs="+", help="indicator CSV file(s)")
    p_col.add_argument("--results", required=True, help="results file from a fit run")
    p_col.add_argument("--countries", default=None, help="comma-separated country codes (default: all fitted)")
    _add_cleaning_flags(p_col)
    _add_output_flags(p_col, "collapse.csv")
    p_col.set_defaults(func=cmd_collapse)

    p_sim = sub.add_parser("simulate", help="emit a model trajectory as CSV rows g,a,i,s")
    p_sim.add_argument("--k1", type=float, required=True)
    p_sim.add_argument("--k2", type=float, required=True)
    p_sim.add_argument("--alpha", type=float, required=True)
    p_sim.add_argument("--g0", type=float, required=True)
    p_sim.add_argument("--g-min", type=float, required=True, dest="g_min")
    p_sim.add_argument("--g-max", type=float, required=True, dest="g_max")
    p_sim.add_argument("--points", type=int, default=121, help="grid points (default 121)")
    p_sim.add_argument("--rk4", action="store_true", help="integrate numerically instead of using the closed forms")
    p_sim.add_argument("--step", type=float, default=1e-3, help="integrator step for --rk4 (default 1e-3)")
    _add_output_flags(p_sim, None)
    p_sim.set_defaults(func=cmd_simulate)

    p_cor = sub.add_parser("correlate", help="Pearson r between ln(a) and an auxiliary indicator at one year")
    p_cor.add_argument("inputs", nargs="+", help="indicator CSV file(s) with GDP and sector shares")
    p_cor.add_argument("--rural", required=True, help="auxiliary indicator file (rural population share)")
    p_cor.add_argument("--year", type=int, required=True, help="year to correlate at")
    p_cor.add_argument(
        "--rural-code", default=ingest.RURAL_SERIES, help=f"auxiliary series code (default {ingest.RURAL_SERIES})"
    )
    p_cor.set_defaults(func=cmd_correlate)

    p_cls = sub.add_parser("classify", help="print the transfer type for parameters or a results file")
    p_cls.add_argument("--k1", type=float, default=None)
    p_cls.add_argument("--k2", type=float, default=None)
    p_cls.add_argument("--alpha", type=float, default=None)
    p_cls.add_argument("--g0", type=float, default=0.0, help="unused by classification; kept for symmetry")
    p_cls.add_argument("--results", default=None, help="classify every row of a results file instead")
    p_cls.set_defaults(func=cmd_classify)

    return parser


def _load_table(paths, year_range=ingest.DEFAULT_YEAR_RANGE, series=ingest.DEFAULT_SERIES):
    return ingest.merge_tables(
        [ingest.parse_indicators(p, series_codes=series, year_range=year_range) for p in paths]
    )


def _cleaning_config(args) -> ingest.CleaningConfig:
    exclusions = (
        ingest.load_exclusions(args.exclusions)
        if args.exclusions is not None
        else ingest.default_exclusions()
    )
    return ingest.CleaningConfig(
        cutoff_year=args.cutoff_year, exclusions=exclusions, min_years=args.min_years
    )


def cmd_fit(args) -> int:
    table = _load_table(args.inputs)
    assembled = ingest.assemble_series(table, _cleaning_config(args))
    config = FitConfig(threshold=args.threshold, min_obs=args.min_years, seed=args.seed)
    outcome = fit_all(assembled.series, config, jobs=max(1, args.jobs))
    ingest.write_results(outcome.results, args.out, args.format)
    for code, reason in sorted(assembled.dropped.items()):
        print(f"dropped {code}: {reason}", file=sys.stderr)
    for failure in outcome.failures:
        print(f"failed {failure.code}: {failure.reason}", file=sys.stderr)
    summary = outcome.summary
    print(
        f"series: {summary.n_series}  eligible: {summary.n_eligible}  "
        f"fitted: {summary.n_fitted}  accepted: {summary.n_accepted}"
    )
    counts = " ".join(f"{tid}:{n}" for tid, n in summary.type_counts.items())
    line = f"types: {counts}" if counts else "types:"
    if summary.n_unclassifiable:
        line += f"  unclassifiable: {summary.n_unclassifiable}"
    print(line)
    print(f"results written to {args.out}")
    return 0 if summary.n_accepted > 0 else 1


def cmd_collapse(args) -> int:
    table = _load_table(args.inputs)
    assembled = ingest.assemble_series(table, _cleaning_config(args))
    fits = {r.code: r for r in ingest.read_results(args.results)}
    series_map = {s.code: s for s in assembled.series}
    if args.countries is not None:
        requested = [c.strip().upper() for c in args.countries.split(",") if c.strip()]
        for code in requested:
            if code not in fits:
                return _fail(f"no fit for requested country {code} in {args.results}")
            if code not in series_map:
                return _fail(f"no usable observations for requested country {code}")
    else:
        requested = sorted(set(fits) & set(series_map))
    points = []
    for code in requested:
        points.extend(collapse_points_for(series_map[code], fits[code]))
    ingest.write_collapse_points(points, args.out, args.format)
    print(f"collapse points: {len(points)} from {len(requested)} countries, written to {args.out}")
    return 0


def cmd_simulate(args) -> int:
    if not np.isfinite([args.k1, args.k2, args.alpha, args.g0, args.g_min, args.g_max]).all():
        return _fail("parameters and range must be finite")
    if args.g_max < args.g_min:
        return _fail(f"--g-max {args.g_max} is below --g-min {args.g_min}")
    if args.points < 1:
        return _fail(f"--points must be >= 1, got {args.points}")
    if args.step <= 0.0:
        return _fail(f"--step must be positive, got {args.step}")
    params = ModelParams(k1=args.k1, k2=args.k2, alpha=args.alpha, g0=args.g0)
    if args.g_max == args.g_min:
        grid = np.array([args.g_min])
    elif args.points < 2:
        return _fail("a range with positive width needs --points >= 2")
    else:
        grid = np.linspace(args.g_min, args.g_max, args.points)
    rows = shares_curve(params, grid)
    if args.rk4:
        # Seed the integrator from the closed form at the range start, then
        # march segment by segment so output rows land exactly on the grid.
        state = SectorShares(*(float(v) for v in rows[0]))
        rk4_rows = [rows[0]]
        for left, right in zip(grid[:-1], grid[1:]):
            trajectory = rk4_integrate(params, float(left), state, float(right), args.step)
            state = SectorShares(*(float(v) for v in trajectory.shares[-1]))
            rk4_rows.append(trajectory.shares[-1])
        rows = np.vstack(rk4_rows)
    handle = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        writer = csv.writer(handle)
        writer.writerow(["g", "a", "i", "s"])
        for g_value, (a, i, s) in zip(grid, rows):
            writer.writerow([repr(float(g_value)), repr(float(a)), repr(float(i)), repr(float(s))])
    finally:
        if args.out:
            handle.close()
    return 0


def cmd_correlate(args) -> int:
    window = (args.year, args.year)
    table = _load_table(args.inputs, year_range=window)
    rural_table = _load_table([args.rural], year_range=window, series=(args.rural_code,))
    rural = ingest.join_auxiliary(rural_table, args.year, args.rural_code)
    ln_a, rural_frac, gdp = [], [], []
    for code in table.countries():
        share_pct = table.value(code, ingest.AGR_SERIES, args.year)
        gdp_value = table.value(code, ingest.GDP_SERIES, args.year)
        if share_pct is None or gdp_value is None or code not in rural:
            continue
        if share_pct <= 0.0 or gdp_value <= 0.0:
            continue
        ln_a.append(float(np.log(share_pct / 100.0)))
        rural_frac.append(rural[code])
        gdp.append(gdp_value)
    if len(ln_a) < 2:
        return _fail(f"degenerate sample: only {len(ln_a)} countries have all inputs for {args.year}")
    try:
        r = pearson_r(ln_a, rural_frac)
    except DegenerateDataError as exc:
        return _fail(f"degenerate sample: {exc}")
    print(f"pearson_r = {r:.6f}")
    print(f"countries: {len(ln_a)}  year: {args.year}")
    if len(ln_a) < 4:
        print("too few countries for quartile statistics", file=sys.stderr)
        return 0
    stats = quartile_stats(gdp, np.column_stack([ln_a, rural_frac]))
    print("quartile n gdp_lo gdp_hi ln_a_mean ln_a_std rural_mean rural_std")
    for number, group in enumerate(stats.groups, start=1):
        print(
            f"q{number} {group.size} {group.key_lo:.6g} {group.key_hi:.6g} "
            f"{group.u_mean:.6f} {group.u_std:.6f} {group.v_mean:.6f} {group.v_std:.6f}"
        )
    return 0


def cmd_classify(args) -> int:
    if args.results is not None:
        for result in ingest.read_results(args.results):
            if result.transfer_type is None:
                print(f"{result.code} unclassifiable (parameters on a type boundary)")
            else:
                t = result.transfer_type
                print(f"{result.code} type {t.id}  {t.directions}")
        return 0
    if args.k1 is None or args.k2 is None or args.alpha is None:
        return _fail("classify needs --k1, --k2 and --alpha (or --results)")
    try:
        t = classify(ModelParams(k1=args.k1, k2=args.k2, alpha=args.alpha, g0=args.g0))
    except UnclassifiableParamsError as exc:
        return _fail(str(exc))
    print(f"type {t.id}  {t.directions}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ingest.MalformedFileError, ingest.UnknownYearError) as exc:
        return _fail(str(exc))
    except OSError as exc:
        return _fail(str(exc))


def entrypoint() -> None:
    raise SystemExit(main())
