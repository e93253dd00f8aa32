"""Command-line interface.

Subcommands:
    simulate  run a configured scan and write scan.csv + config.json
    analyze   summarize a scan CSV into a key,value report CSV
    fig4      write the analytic reference curves as CSV
    stats     print occupancy statistics for a mean photon number
    ingest    extract events from an oscilloscope trace file

Exit codes: 0 success, 2 configuration error, 3 data or parse error,
4 numerical error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import load_config, config_to_dict
from .errors import ConfigError, DataError, DomainError, NumericalError
from .runner import (
    analytic_fig4,
    build_report,
    export_fig4_csv,
    export_report_csv,
    export_scan_csv,
    read_scan_csv,
    run_scan,
    ScanResult,
)
from .source import mean_photon_number, pair_fraction, poisson_pmf, poisson_tail
from .traces import ingest_trace, read_trace_csv, read_trace_raw

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4


def _cmd_simulate(args: argparse.Namespace) -> int:
    cfg = load_config(args.config, seed_override=args.seed)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    result = run_scan(cfg, workers=args.workers)
    export_scan_csv(result, out_dir / "scan.csv")
    (out_dir / "config.json").write_text(json.dumps(config_to_dict(cfg), indent=2) + "\n")
    print(f"wrote {out_dir / 'scan.csv'} ({len(result.points)} points, seed {result.seed})")
    return EXIT_OK


def _cmd_analyze(args: argparse.Namespace) -> int:
    points = read_scan_csv(args.scan)
    result = ScanResult(points=points, seed=-1, config={})
    report = build_report(
        result,
        dead_time=args.dead_time,
        accumulation=args.bin_seconds,
        delta_t=args.delta_t,
    )
    export_report_csv(report, args.out)
    for key, value in report.as_items():
        print(f"{key}: {value}")
    return EXIT_OK


def _cmd_fig4(args: argparse.Namespace) -> int:
    x = np.linspace(-args.span, args.span, args.points)
    curves = analytic_fig4(args.v, args.leff, x, wavelength=args.wavelength)
    export_fig4_csv(curves, args.out)
    print(f"wrote {args.out} ({args.points} grid points)")
    return EXIT_OK


def _cmd_stats(args: argparse.Namespace) -> int:
    mean = args.mean
    print(f"mean photons per slot: {mean}")
    print("n  P(n)")
    for n in range(6):
        print(f"{n}  {poisson_pmf(n, mean):.6e}")
    print(f">=3  {poisson_tail(3, mean):.6e}")
    print(f"pair/single ratio P(2)/P(1) = mean/2 = {pair_fraction(mean):.6g}")
    slots = 1.0 / args.dead_time
    print(f"slots per second at {args.dead_time*1e9:.0f} ns dead time: {slots:.6g}")
    print(f"expected singles per second: {slots * poisson_pmf(1, mean):.6g}")
    print(f"expected pairs per second:   {slots * poisson_pmf(2, mean):.6g}")
    print(
        "mean recovered from those singles: "
        f"{mean_photon_number(slots * poisson_pmf(1, mean), 1.0, args.dead_time):.6g}"
    )
    return EXIT_OK


def _cmd_ingest(args: argparse.Namespace) -> int:
    path = Path(args.trace)
    fmt = args.format or ("csv" if path.suffix.lower() == ".csv" else "raw")
    if fmt == "csv":
        trace = read_trace_csv(path, threshold=args.threshold)
    else:
        trace = read_trace_raw(path, sampling_period=args.sampling_period, threshold=args.threshold)
    events1, events2 = ingest_trace(trace)
    with open(args.out, "w", newline="") as fh:
        fh.write("channel,time_s\n")
        for t in events1:
            fh.write(f"1,{t!r}\n")
        for t in events2:
            fh.write(f"2,{t!r}\n")
    print(f"channel 1: {events1.size} events; channel 2: {events2.size} events")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pstream", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"pstream {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a configured scan")
    p.add_argument("--config", required=True, help="JSON experiment configuration")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--workers", type=int, default=1, help="worker threads for scan points")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("analyze", help="summarize a scan CSV")
    p.add_argument("--scan", required=True, help="scan CSV produced by simulate")
    p.add_argument("--out", required=True, help="report CSV path")
    p.add_argument("--dead-time", type=float, default=22e-9, dest="dead_time")
    p.add_argument("--delta-t", type=float, default=10e-9, dest="delta_t")
    p.add_argument("--bin-seconds", type=float, default=1.0, dest="bin_seconds")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("fig4", help="write analytic reference curves")
    p.add_argument("--v", type=float, required=True, help="intrinsic visibility")
    p.add_argument("--leff", type=float, required=True, help="envelope FWHM in meters")
    p.add_argument("--out", required=True)
    p.add_argument("--span", type=float, default=4e-6, help="half-range of the x grid, meters")
    p.add_argument("--points", type=int, default=2001)
    p.add_argument("--wavelength", type=float, default=632.8e-9)
    p.set_defaults(func=_cmd_fig4)

    p = sub.add_parser("stats", help="occupancy statistics for a mean photon number")
    p.add_argument("--mean", type=float, required=True)
    p.add_argument("--dead-time", type=float, default=22e-9, dest="dead_time")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("ingest", help="extract events from a trace file")
    p.add_argument("--trace", required=True)
    p.add_argument("--out", required=True, help="events CSV path")
    p.add_argument("--format", choices=["csv", "raw"], default=None)
    p.add_argument("--sampling-period", type=float, default=400e-12, dest="sampling_period")
    p.add_argument("--threshold", type=float, default=2.0)
    p.set_defaults(func=_cmd_ingest)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DomainError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
