"""Experiment orchestration: graph sourcing, sweeps, and CSV reporting."""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import EdgeListError
from .generate import GenSpec, min_density, random_chordal_dag
from .graphs import Dag
from .strategies import StrategyKind
from .training import RunRecord, evaluate

MEAN_RATIO_HEADER = ["n", "rho", "strategy", "step", "mean_ratio",
                     "n_ok", "n_fail"]
TIMING_HEADER = ["n", "rho", "strategy", "mean_seconds",
                 "speedup_vs_learned"]
RUNS_HEADER = ["graph_id", "strategy", "step", "ratio", "select_ms"]


@dataclass(frozen=True)
class LoadedGraph:
    dag: Dag
    names: tuple[str, ...]      # node-name <-> dense-id mapping
    graph_id: str


def load_edge_list(path: str | Path) -> LoadedGraph:
    """Parse a 'u v' directed-edge-per-line file into a DAG.

    '#' starts a comment; node names map to dense ids in order of first
    appearance. A cycle is an input error: the network must be a DAG.
    """
    path = Path(path)
    names: list[str] = []
    index: dict[str, int] = {}
    arcs: list[tuple[int, int]] = []

    def node_id(name: str) -> int:
        if name not in index:
            index[name] = len(names)
            names.append(name)
        return index[name]

    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise EdgeListError(
                f"{path}:{lineno}: expected 'u v', got {raw!r}")
        u, v = parts
        if u == v:
            raise EdgeListError(f"{path}:{lineno}: self-loop on {u!r}")
        arcs.append((node_id(u), node_id(v)))
    n = len(names)
    parents: list[list[int]] = [[] for _ in range(n)]
    for u, v in arcs:
        if u in parents[v]:
            raise EdgeListError(f"{path}: duplicate edge {names[u]} {names[v]}")
        parents[v].append(u)
    try:
        dag = Dag(n, parents)
    except ValueError as exc:
        raise EdgeListError(f"{path}: not a DAG ({exc})") from exc
    return LoadedGraph(dag=dag, names=tuple(names), graph_id=path.stem)


@dataclass
class BenchSpec:
    """One sweep: graph sources x strategies x repetitions."""
    gen: list[dict] = field(default_factory=list)   # {n, rho, count}
    edge_lists: list[str] = field(default_factory=list)
    strategies: list[StrategyKind] = field(default_factory=list)
    budget: int = 5
    repetitions: int = 1
    timeout: Optional[float] = 60.0
    seed: int = 0
    outdir: Optional[str] = None

    def validate(self) -> None:
        if self.budget < 0:
            raise ValueError("budget must be >= 0")
        if not self.gen and not self.edge_lists:
            raise ValueError("need at least one graph source")
        if not self.strategies:
            raise ValueError("need at least one strategy")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")


def materialize_graphs(spec: BenchSpec) -> tuple[list[Dag], list[str], list[float]]:
    graphs: list[Dag] = []
    ids: list[str] = []
    rhos: list[float] = []
    rng = np.random.default_rng(spec.seed)
    for cell in spec.gen:
        n, rho, count = int(cell["n"]), float(cell["rho"]), int(cell["count"])
        gspec = GenSpec(n=n, rho=max(rho, min_density(n)))
        for i in range(count):
            graphs.append(random_chordal_dag(gspec, rng))
            ids.append(f"n{n}_rho{rho:g}_{i:03d}")
            rhos.append(rho)
    for path in spec.edge_lists:
        loaded = load_edge_list(path)
        graphs.append(loaded.dag)
        ids.append(loaded.graph_id)
        d = loaded.dag
        rhos.append(d.edge_count() / (d.n * (d.n - 1) / 2))
    return graphs, ids, rhos


def run_bench(spec: BenchSpec) -> list[RunRecord]:
    """Evaluate every (graph, strategy, repetition); write reports if outdir."""
    spec.validate()
    graphs, ids, rhos = materialize_graphs(spec)
    records: list[RunRecord] = []
    for kind in spec.strategies:
        for rep in range(spec.repetitions):
            recs = evaluate(kind, graphs, spec.budget,
                            seed=spec.seed + rep, timeout=spec.timeout,
                            graph_ids=[f"{g}_r{rep}" for g in ids]
                            if spec.repetitions > 1 else ids,
                            densities=rhos)
            records.extend(recs)
    if spec.outdir:
        out = Path(spec.outdir)
        out.mkdir(parents=True, exist_ok=True)
        write_runs_csv(records, out / "runs.csv")
        write_mean_ratio_csv(records, spec.budget, out / "mean_ratio.csv")
        write_timing_csv(records, out / "timing.csv")
    return records


def write_runs_csv(records: Sequence[RunRecord], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(RUNS_HEADER)
        for rec in records:
            for step, ratio in enumerate(rec.ratios):
                ms = rec.select_seconds[step - 1] * 1000.0 if step else 0.0
                w.writerow([rec.graph_id, rec.strategy, step,
                            f"{ratio:.10g}", f"{ms:.6g}"])


def _cells(records: Sequence[RunRecord]):
    cells: dict[tuple[int, float, str], list[RunRecord]] = {}
    for rec in records:
        cells.setdefault((rec.n, rec.rho, rec.strategy), []).append(rec)
    return dict(sorted(cells.items(), key=lambda kv: (kv[0][0], kv[0][1],
                                                      kv[0][2])))


def write_mean_ratio_csv(records: Sequence[RunRecord], budget: int,
                         path: str | Path) -> None:
    """Per (n, rho, strategy, step): mean ratio over ok runs.

    A trajectory that fully orients its graph early keeps its final ratio
    for the remaining steps, so every ok run contributes to every step.
    """
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(MEAN_RATIO_HEADER)
        for (n, rho, strategy), recs in _cells(records).items():
            ok = [r for r in recs if r.status == "ok"]
            n_fail = len(recs) - len(ok)
            for step in range(budget + 1):
                if ok:
                    vals = [r.ratios[min(step, len(r.ratios) - 1)] for r in ok]
                    mean = f"{float(np.mean(vals)):.10g}"
                else:
                    mean = ""
                w.writerow([n, f"{rho:g}", strategy, step, mean,
                            len(ok), n_fail])


def write_timing_csv(records: Sequence[RunRecord], path: str | Path) -> None:
    """Mean selection seconds per run, with speedups vs the learned rows."""
    cells = _cells(records)
    learned_mean: dict[tuple[int, float], float] = {}
    for (n, rho, strategy), recs in cells.items():
        ok = [r for r in recs if r.status == "ok"]
        if strategy == "learned" and ok:
            learned_mean[(n, rho)] = float(
                np.mean([sum(r.select_seconds) for r in ok]))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TIMING_HEADER)
        for (n, rho, strategy), recs in cells.items():
            ok = [r for r in recs if r.status == "ok"]
            if ok:
                mean = float(np.mean([sum(r.select_seconds) for r in ok]))
                base = learned_mean.get((n, rho))
                speedup = f"{mean / base:.6g}" if base else ""
                w.writerow([n, f"{rho:g}", strategy, f"{mean:.6g}", speedup])
            else:
                w.writerow([n, f"{rho:g}", strategy, "", ""])


def export_plot_data(bench_dir: str | Path, out_dir: str | Path,
                     budget: int = 5) -> None:
    """Re-derive the two tidy summary CSVs from a bench run directory."""
    bench_dir, out_dir = Path(bench_dir), Path(out_dir)
    for name in ("mean_ratio.csv", "timing.csv"):
        src = bench_dir / name
        if not src.exists():
            raise FileNotFoundError(f"missing {src}; run `bench` first")
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, header in (("mean_ratio.csv", MEAN_RATIO_HEADER),
                         ("timing.csv", TIMING_HEADER)):
        rows = list(csv.reader((bench_dir / name).open()))
        if not rows or rows[0] != header:
            raise ValueError(f"{bench_dir / name}: unexpected header {rows[:1]}")
        with open(out_dir / name, "w", newline="") as fh:
            csv.writer(fh).writerows(rows)


def write_manifest(spec: BenchSpec, graphs: Sequence[Dag],
                   ids: Sequence[str], path: str | Path) -> None:
    obj = {
        "budget": spec.budget,
        "repetitions": spec.repetitions,
        "seed": spec.seed,
        "graphs": [{"id": gid, "n": g.n, "edges": g.edge_count()}
                   for gid, g in zip(ids, graphs)],
    }
    Path(path).write_text(json.dumps(obj, indent=2))
