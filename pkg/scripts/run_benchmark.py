#!/usr/bin/env python3
"""Benchmark every strategy over a grid of generated graphs.

Produces runs.csv, mean_ratio.csv and timing.csv in --out, ready for the
causalplots package. Pass --model to include the learned strategy.
"""
from __future__ import annotations

import argparse

from causaldesign import ModelParams, StrategyKind
from causaldesign.bench import BenchSpec, run_bench


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nodes", type=int, nargs="+", default=[10, 15])
    ap.add_argument("--rho", type=float, nargs="+", default=[0.2, 0.3])
    ap.add_argument("--count", type=int, default=10,
                    help="graphs per (n, rho) cell")
    ap.add_argument("--budget", type=int, default=5)
    ap.add_argument("--samples", type=int, default=16,
                    help="Monte-Carlo draws for the average strategy")
    ap.add_argument("--timeout", type=float, default=60.0)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--model", help="checkpoint for the learned strategy")
    ap.add_argument("--with-optimal", action="store_true",
                    help="include exhaustive planning (small graphs only)")
    ap.add_argument("--out", default="bench_out")
    args = ap.parse_args()

    strategies = [StrategyKind("random"),
                  StrategyKind("entropy"),
                  StrategyKind("minimax"),
                  StrategyKind("average", samples=args.samples)]
    if args.model:
        strategies.append(StrategyKind("learned",
                                       params=ModelParams.load(args.model)))
    if args.with_optimal:
        strategies.append(StrategyKind("optimal"))

    spec = BenchSpec(gen=[{"n": n, "rho": rho, "count": args.count}
                          for n in args.nodes for rho in args.rho],
                     strategies=strategies, budget=args.budget,
                     timeout=args.timeout, seed=args.seed, outdir=args.out)
    records = run_bench(spec)
    bad = [r for r in records if r.status != "ok"]
    print(f"{len(records)} runs ({len(bad)} non-ok) -> {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
