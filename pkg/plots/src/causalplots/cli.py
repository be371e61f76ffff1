"""Standalone figure generation from benchmark summary CSVs."""
from __future__ import annotations

import argparse
import sys

from .figures import PlotJob, SchemaError, plot_ratio_curves, plot_timings


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="causalplots",
        description="Turn benchmark summary CSVs into figures")
    p.add_argument("--ratio", help="mean_ratio.csv path")
    p.add_argument("--timing", help="timing.csv path")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--format", choices=["png", "svg"], default="png")
    p.add_argument("--strategies", nargs="+",
                   help="only plot these strategies")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if not args.ratio and not args.timing:
        print("error: need --ratio and/or --timing", file=sys.stderr)
        return 2
    job = PlotJob(ratio_csv=args.ratio, timing_csv=args.timing,
                  out_dir=args.out, fmt=args.format,
                  strategies=args.strategies)
    written = []
    try:
        if args.ratio:
            written.extend(plot_ratio_curves(job))
        if args.timing:
            written.append(plot_timings(job))
    except (SchemaError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
