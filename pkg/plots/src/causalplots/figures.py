"""Benchmark figures from the two tidy summary CSVs.

Reads only mean_ratio.csv (n,rho,strategy,step,mean_ratio,n_ok,n_fail)
and timing.csv (n,rho,strategy,mean_seconds,speedup_vs_learned). Ratio
curves come out one figure per (n, rho) cell; timings come out as a
single grouped log-scale bar chart with annotated gaps for cells whose
runs all failed or timed out.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

MEAN_RATIO_COLUMNS = ["n", "rho", "strategy", "step", "mean_ratio",
                      "n_ok", "n_fail"]
TIMING_COLUMNS = ["n", "rho", "strategy", "mean_seconds",
                  "speedup_vs_learned"]

# one fixed color per strategy so every figure colors lines the same way
STRATEGY_COLORS = {
    "random": "#7f7f7f",
    "entropy": "#1f77b4",
    "minimax": "#2ca02c",
    "average": "#ff7f0e",
    "learned": "#d62728",
    "optimal": "#9467bd",
}
FALLBACK_COLOR = "#8c564b"


class SchemaError(ValueError):
    """A summary CSV is missing a required column."""


@dataclass
class PlotJob:
    ratio_csv: Optional[str] = None
    timing_csv: Optional[str] = None
    out_dir: str = "."
    fmt: str = "png"
    strategies: Optional[Sequence[str]] = None   # optional filter

    def __post_init__(self):
        if self.fmt not in ("png", "svg"):
            raise ValueError(f"unsupported figure format {self.fmt!r}")


def _color(strategy: str) -> str:
    return STRATEGY_COLORS.get(strategy, FALLBACK_COLOR)


def _read_rows(path: str | Path, columns: list[str]) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in columns:
            if col not in header:
                raise SchemaError(f"{path}: missing column {col!r}")
        return list(reader)


def _filtered(rows: list[dict], job: PlotJob) -> list[dict]:
    if job.strategies is None:
        return rows
    allowed = set(job.strategies)
    return [r for r in rows if r["strategy"] in allowed]


def plot_ratio_curves(job: PlotJob) -> list[Path]:
    """One discovered-edge-ratio figure per (n, rho) cell."""
    if job.ratio_csv is None:
        raise ValueError("job has no ratio CSV")
    rows = _filtered(_read_rows(job.ratio_csv, MEAN_RATIO_COLUMNS), job)
    if not rows:
        raise ValueError(f"{job.ratio_csv}: no rows left to plot")
    cells: dict[tuple[str, str], dict[str, list[tuple[int, float]]]] = {}
    for row in rows:
        if row["mean_ratio"] == "":
            continue  # cell had no successful runs at this step
        series = cells.setdefault((row["n"], row["rho"]), {})
        series.setdefault(row["strategy"], []).append(
            (int(row["step"]), float(row["mean_ratio"])))
    if not cells:
        raise ValueError(f"{job.ratio_csv}: every cell is empty")
    out = Path(job.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for (n, rho), series in sorted(cells.items()):
        fig, ax = plt.subplots(figsize=(5, 3.5))
        for strategy in sorted(series):
            pts = sorted(series[strategy])
            ax.plot([s for s, _ in pts], [v for _, v in pts],
                    marker="o", markersize=3, label=strategy,
                    color=_color(strategy))
        ax.set_xlabel("interventions")
        ax.set_ylabel("mean discovered edge ratio")
        ax.set_ylim(-0.02, 1.02)
        ax.set_title(f"n={n}, rho={rho}")
        ax.legend(fontsize=8)
        fig.tight_layout()
        path = out / f"ratio_n{n}_rho{rho}.{job.fmt}"
        fig.savefig(path)
        plt.close(fig)
        written.append(path)
    return written


def plot_timings(job: PlotJob) -> Path:
    """Grouped log-scale bars of mean selection seconds per strategy."""
    if job.timing_csv is None:
        raise ValueError("job has no timing CSV")
    rows = _filtered(_read_rows(job.timing_csv, TIMING_COLUMNS), job)
    if not rows:
        raise ValueError(f"{job.timing_csv}: no rows left to plot")
    cells = sorted({(r["n"], r["rho"]) for r in rows})
    strategies = sorted({r["strategy"] for r in rows})
    means: dict[tuple[str, str, str], Optional[float]] = {}
    for r in rows:
        val = float(r["mean_seconds"]) if r["mean_seconds"] != "" else None
        means[(r["n"], r["rho"], r["strategy"])] = val

    fig, ax = plt.subplots(figsize=(6, 3.5))
    width = 0.8 / len(strategies)
    floor = min((v for v in means.values() if v), default=1e-3) / 10
    for si, strategy in enumerate(strategies):
        xs, ys = [], []
        for ci, (n, rho) in enumerate(cells):
            x = ci + si * width
            val = means.get((n, rho, strategy))
            if val is None:
                # failed cell: annotated gap instead of a bar
                ax.annotate("t/o", (x + width / 2, floor * 2),
                            ha="center", fontsize=7, rotation=90)
                continue
            xs.append(x)
            ys.append(val)
        if xs:
            ax.bar(xs, ys, width=width, align="edge", label=strategy,
                   color=_color(strategy))
    ax.set_yscale("log")
    ax.set_ylim(bottom=floor)
    ax.set_xticks([ci + 0.4 for ci in range(len(cells))])
    ax.set_xticklabels([f"n={n}\nrho={rho}" for n, rho in cells], fontsize=8)
    ax.set_ylabel("mean selection seconds")
    ax.legend(fontsize=8)
    fig.tight_layout()
    out = Path(job.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"timing.{job.fmt}"
    fig.savefig(path)
    plt.close(fig)
    return path
