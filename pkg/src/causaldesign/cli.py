"""Command-line entry points: gen, train, eval, bench, export-plots-data.

Options may come from a JSON config file (--config) with flag overrides;
CAUSALDESIGN_OUT sets the default output root.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .bench import (BenchSpec, export_plot_data, materialize_graphs,
                    run_bench, write_manifest)
from .generate import GenSpec, random_chordal_dag
from .graphs import Dag
from .model import ModelParams
from .strategies import StrategyKind
from .training import (TrainConfig, evaluate, train, write_eval_csv,
                       write_training_log)


def _out_root() -> Path:
    return Path(os.environ.get("CAUSALDESIGN_OUT", "."))


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    return json.loads(Path(path).read_text())


def _resolve_out(arg: str | None, default: str) -> Path:
    out = Path(arg) if arg else _out_root() / default
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_gen(args) -> int:
    out = _resolve_out(args.out, "graphs")
    rng = np.random.default_rng(args.seed)
    spec = GenSpec(n=args.n, rho=args.rho)
    manifest = []
    for i in range(args.count):
        dag = random_chordal_dag(spec, rng)
        gid = f"n{args.n}_rho{args.rho:g}_{i:03d}"
        (out / f"{gid}.json").write_text(
            json.dumps(dag.to_pdag().to_json_obj()))
        manifest.append({"id": gid, "n": dag.n, "edges": dag.edge_count(),
                         "density": dag.edge_count()
                         / (dag.n * (dag.n - 1) / 2)})
    (out / "manifest.json").write_text(json.dumps(
        {"spec": {"n": args.n, "rho": args.rho, "count": args.count,
                  "seed": args.seed},
         "graphs": manifest}, indent=2))
    print(f"wrote {args.count} graphs to {out}")
    return 0


def cmd_train(args) -> int:
    cfg = _load_config(args.config)
    overrides = {k: v for k, v in {
        "episodes": args.episodes, "seed": args.seed,
        "learning_rate": args.learning_rate,
    }.items() if v is not None}
    cfg.update(overrides)
    if "node_counts" in cfg:
        cfg["node_counts"] = tuple(cfg["node_counts"])
    if "densities" in cfg:
        cfg["densities"] = tuple(cfg["densities"])
    config = TrainConfig(**cfg)
    out = _resolve_out(args.out, "train")
    params, log_rows = train(config, checkpoint_dir=out)
    write_training_log(log_rows, out / "training_log.csv")
    print(f"trained {config.episodes} episodes; checkpoint in {out}")
    return 0


def _strategy_from_args(args) -> StrategyKind:
    params = ModelParams.load(args.model) if args.model else None
    return StrategyKind(tag=args.strategy, cap=args.cap,
                        samples=args.samples, model_path=args.model,
                        params=params)


def _load_graphs(paths: list[str]) -> tuple[list[Dag], list[str]]:
    from .bench import load_edge_list
    from .graphs import Pdag
    graphs, ids = [], []
    for p in paths:
        path = Path(p)
        files = sorted(path.glob("*.json")) if path.is_dir() else [path]
        for f in files:
            if f.name == "manifest.json":
                continue
            if f.suffix == ".json":
                pdag = Pdag.from_json_obj(json.loads(f.read_text()))
                parents = [pdag.parents(v) for v in range(pdag.n)]
                graphs.append(Dag(pdag.n, parents))
            else:
                graphs.append(load_edge_list(f).dag)
            ids.append(f.stem)
    return graphs, ids


def cmd_eval(args) -> int:
    kind = _strategy_from_args(args)
    graphs, ids = _load_graphs(args.graphs)
    records = evaluate(kind, graphs, args.budget, seed=args.seed,
                       timeout=args.timeout, graph_ids=ids)
    out = _resolve_out(args.out, "eval")
    write_eval_csv(records, out / "runs.csv")
    bad = [r for r in records if r.status != "ok"]
    print(f"evaluated {len(records)} runs ({len(bad)} non-ok) -> {out}")
    return 0


def cmd_bench(args) -> int:
    cfg = _load_config(args.config)
    strategies = [StrategyKind(
        tag=s["tag"], cap=s.get("cap", 100_000),
        samples=s.get("samples"), model_path=s.get("model"),
        params=ModelParams.load(s["model"]) if s.get("model") else None)
        for s in cfg.get("strategies", [])]
    spec = BenchSpec(gen=cfg.get("gen", []),
                     edge_lists=cfg.get("edge_lists", []),
                     strategies=strategies,
                     budget=cfg.get("budget", 5),
                     repetitions=cfg.get("repetitions", 1),
                     timeout=cfg.get("timeout", 60.0),
                     seed=args.seed if args.seed is not None
                     else cfg.get("seed", 0),
                     outdir=str(_resolve_out(args.out, "bench")))
    records = run_bench(spec)
    graphs, ids, _ = materialize_graphs(spec)
    write_manifest(spec, graphs, ids, Path(spec.outdir) / "manifest.json")
    bad = [r for r in records if r.status != "ok"]
    print(f"bench complete: {len(records)} runs ({len(bad)} non-ok) "
          f"-> {spec.outdir}")
    return 0


def cmd_export(args) -> int:
    out = _resolve_out(args.out, "plots-data")
    export_plot_data(args.bench, out, budget=args.budget)
    print(f"exported tidy CSVs to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="causaldesign",
                                description="Active causal experiment design")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate chordal DAGs")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--rho", type=float, required=True)
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    t = sub.add_parser("train", help="train the Q-policy")
    t.add_argument("--config", help="JSON file with TrainConfig fields")
    t.add_argument("--episodes", type=int)
    t.add_argument("--seed", type=int)
    t.add_argument("--learning-rate", type=float, dest="learning_rate")
    t.add_argument("--out")
    t.set_defaults(func=cmd_train)

    e = sub.add_parser("eval", help="evaluate one strategy")
    e.add_argument("--strategy", required=True,
                   choices=["random", "entropy", "minimax", "average",
                            "learned", "optimal"])
    e.add_argument("--graphs", nargs="+", required=True,
                   help="graph JSON files/dirs or edge-list files")
    e.add_argument("--budget", type=int, default=5)
    e.add_argument("--samples", type=int)
    e.add_argument("--cap", type=int, default=100_000)
    e.add_argument("--model", help="checkpoint for the learned strategy")
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--timeout", type=float, default=60.0)
    e.add_argument("--out")
    e.set_defaults(func=cmd_eval)

    b = sub.add_parser("bench", help="multi-strategy sweep")
    b.add_argument("--config", required=True,
                   help="JSON bench spec (gen cells, strategies, budget)")
    b.add_argument("--seed", type=int)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bench)

    x = sub.add_parser("export-plots-data",
                       help="tidy CSVs for the plots component")
    x.add_argument("--bench", required=True, help="bench output directory")
    x.add_argument("--budget", type=int, default=5)
    x.add_argument("--out")
    x.set_defaults(func=cmd_export)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
