"""Q-learning over intervention episodes: exploration, replay, updates.

Single-threaded by design so that a fixed seed reproduces graphs,
exploration, batches and parameter updates bit-exactly.
"""
from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import CapacityError, NoActionError
from .generate import GenSpec, min_density, random_chordal_dag
from .graphs import (Dag, Pdag, apply_intervention, cpdag_from_dag,
                     discovered_edge_ratio)
from .mec import enumerate_extensions
from .model import ModelParams, init_params, td_loss_grad
from .strategies import (StrategyKind, action_set, plan_optimal,
                         select_average, select_entropy, select_learned,
                         select_minimax, select_random)

TRAIN_LOG_HEADER = ["episode", "epsilon", "mean_reward", "loss"]
EVAL_HEADER = ["graph_id", "strategy", "step", "ratio", "select_ms"]


@dataclass(frozen=True)
class Transition:
    """One replay-buffer record."""
    state: Pdag
    action: int
    reward: int
    next_state: Pdag
    terminal: bool


class ReplayBuffer:
    """Bounded ring buffer with oldest-first eviction."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self._ring: list[Transition] = []
        self._next = 0
        self.inserted = 0

    def __len__(self) -> int:
        return len(self._ring)

    def add(self, tr: Transition) -> None:
        if len(self._ring) < self.capacity:
            self._ring.append(tr)
        else:
            self._ring[self._next] = tr
            self._next = (self._next + 1) % self.capacity
        self.inserted += 1

    def sample(self, rng: np.random.Generator, k: int) -> list[Transition]:
        """Uniform sample without replacement within the batch."""
        if k > len(self._ring):
            raise ValueError(f"cannot sample {k} of {len(self._ring)}")
        idx = rng.choice(len(self._ring), size=k, replace=False)
        return [self._ring[int(i)] for i in idx]


@dataclass
class TrainConfig:
    episodes: int = 20_000
    steps_per_episode: int = 5
    update_period: int = 4
    batch_size: int = 64
    learning_rate: float = 1e-3
    gamma: float = 0.9
    eps_start: float = 1.0
    eps_end: float = 0.05
    eps_fraction: float = 0.8
    buffer_capacity: int = 50_000
    node_counts: tuple[int, ...] = (8, 10)
    densities: tuple[float, ...] = (0.2,)
    seed: int = 0
    checkpoint_every: int = 0          # episodes; 0 disables
    embed_dim: int = 32                # p
    feature_dim: int = 1               # q
    layers: int = 4                    # L
    grad_clip: Optional[float] = None

    def validate(self) -> None:
        if self.episodes < 0 or self.steps_per_episode < 1:
            raise ValueError("bad episode/step counts")
        if not 0.0 < self.gamma < 1.0:
            raise ValueError("gamma must be in (0, 1)")
        if not self.eps_start >= self.eps_end >= 0.0:
            raise ValueError("need eps_start >= eps_end >= 0")
        if not 0.0 < self.eps_fraction <= 1.0:
            raise ValueError("eps_fraction must be in (0, 1]")
        for k in ("update_period", "batch_size", "buffer_capacity",
                  "embed_dim", "feature_dim", "layers"):
            if getattr(self, k) < 1:
                raise ValueError(f"{k} must be positive")
        if self.learning_rate <= 0:
            raise ValueError("learning rate must be positive")


def epsilon(e: int, config: TrainConfig) -> float:
    """Linear decay from eps_start at episode 1, flat after the window."""
    if not 1 <= e:
        raise ValueError(f"episode index {e} < 1")
    window = config.eps_fraction * config.episodes
    if e >= window or window <= 1:
        return config.eps_end
    frac = (e - 1) / (window - 1)
    return config.eps_start + (config.eps_end - config.eps_start) * frac


def initial_state(truth: Dag) -> Pdag:
    """Chain part of the essential graph: CPDAG with directed edges removed."""
    return cpdag_from_dag(truth).drop_directed()


def run_episode(truth: Dag, params: ModelParams, eps: float, T: int,
                rng: np.random.Generator) -> list[Transition]:
    """Roll out up to T epsilon-greedy interventions against one truth."""
    state = initial_state(truth)
    transitions: list[Transition] = []
    for j in range(1, T + 1):
        acts = action_set(state)
        if not acts:
            break
        if rng.random() < eps:
            a = int(acts[int(rng.integers(len(acts)))])
        else:
            a = select_learned(state, params)
        out = apply_intervention(state, truth, a)
        terminal = (not out.next_state.undirected_edges()) or j == T
        transitions.append(Transition(state=state, action=a,
                                      reward=out.oriented_count,
                                      next_state=out.next_state,
                                      terminal=terminal))
        state = out.next_state
        if terminal:
            break
    return transitions


def _sample_training_graph(config: TrainConfig,
                           rng: np.random.Generator) -> Dag:
    n = int(config.node_counts[int(rng.integers(len(config.node_counts)))])
    rho = float(config.densities[int(rng.integers(len(config.densities)))])
    # clamp to the connectivity-feasible range; best-effort density
    spec = GenSpec(n=n, rho=max(rho, min_density(n)))
    return random_chordal_dag(spec, rng)


def train(config: TrainConfig, checkpoint_dir: str | Path | None = None
          ) -> tuple[ModelParams, list[dict]]:
    """Algorithm-1 style training; returns final params and a log.

    Log rows carry the trailing-100-episode mean reward and the loss of
    the most recent batch update.
    """
    config.validate()
    rng = np.random.default_rng(config.seed)
    params = init_params(config.embed_dim, config.feature_dim,
                         config.layers, rng)
    buffer = ReplayBuffer(config.buffer_capacity)
    log_rows: list[dict] = []
    returns: list[float] = []
    last_loss = float("nan")
    ckpt_dir = Path(checkpoint_dir) if checkpoint_dir else None
    if ckpt_dir:
        ckpt_dir.mkdir(parents=True, exist_ok=True)
    for e in range(1, config.episodes + 1):
        eps = epsilon(e, config)
        truth = _sample_training_graph(config, rng)
        transitions = run_episode(truth, params, eps,
                                  config.steps_per_episode, rng)
        for tr in transitions:
            buffer.add(tr)
        returns.append(sum(tr.reward for tr in transitions))
        if e % config.update_period == 0 and len(buffer) > 0:
            batch = buffer.sample(rng, min(config.batch_size, len(buffer)))
            last_loss, grads = td_loss_grad(batch, params, config.gamma)
            for b in ModelParams.BLOCKS:
                g = grads[b]
                if config.grad_clip is not None:
                    norm = float(np.linalg.norm(g))
                    if norm > config.grad_clip:
                        g = g * (config.grad_clip / norm)
                getattr(params, b)[...] -= config.learning_rate * g
        log_rows.append({
            "episode": e,
            "epsilon": eps,
            "mean_reward": float(np.mean(returns[-100:])),
            "loss": last_loss,
        })
        if ckpt_dir and config.checkpoint_every and e % config.checkpoint_every == 0:
            params.save(ckpt_dir / f"checkpoint_ep{e}.json")
    if ckpt_dir:
        params.save(ckpt_dir / "checkpoint_final.json")
    return params, log_rows


def write_training_log(rows: Iterable[dict], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=TRAIN_LOG_HEADER)
        w.writeheader()
        for row in rows:
            w.writerow(row)


# ---------------------------------------------------------------------------
# greedy-policy evaluation
# ---------------------------------------------------------------------------

@dataclass
class RunRecord:
    """One evaluation trajectory of one strategy on one graph."""
    graph_id: str
    strategy: str
    ratios: list[float]          # step 0 = CPDAG ratio
    select_seconds: list[float]  # per intervention step
    total_seconds: float
    status: str = "ok"           # ok | timeout | capacity_exceeded
    n: int = 0
    rho: float = float("nan")


def _make_selector(kind: StrategyKind, rng: np.random.Generator,
                   budget_left: list[int]):
    if kind.tag == "learned" and kind.params is None:
        kind.params = ModelParams.load(kind.model_path)
    tag = kind.tag

    def select(state: Pdag) -> int:
        if tag == "random":
            return select_random(state, rng)
        if tag == "entropy":
            return select_entropy(state, kind.cap)
        if tag == "minimax":
            return select_minimax(state, kind.cap)
        if tag == "average":
            return select_average(state, kind.samples or 16, rng, kind.cap)
        if tag == "learned":
            return select_learned(state, kind.params)
        if tag == "optimal":
            exts = enumerate_extensions(state, kind.cap)
            plan = plan_optimal(state, exts, budget_left[0])
            if plan.action is None:
                raise NoActionError("graph is fully oriented")
            return plan.action
        raise ValueError(f"unknown strategy {tag!r}")

    return select


def evaluate(kind: StrategyKind, graphs: Sequence[Dag], budget: int,
             seed: int = 0, timeout: Optional[float] = None,
             graph_ids: Optional[Sequence[str]] = None,
             densities: Optional[Sequence[float]] = None) -> list[RunRecord]:
    """Greedy (eps=0) rollouts recording ratio and timing per step."""
    if budget < 0:
        raise ValueError("budget must be >= 0")
    records = []
    for gi, truth in enumerate(graphs):
        rng = np.random.default_rng((seed, gi))
        gid = graph_ids[gi] if graph_ids else f"g{gi:04d}"
        total = truth.edge_count()
        state = initial_state(truth)
        oriented = total - len(state.undirected_edges())
        ratios = [discovered_edge_ratio(total, oriented)]
        times: list[float] = []
        status = "ok"
        budget_left = [budget]
        select = _make_selector(kind, rng, budget_left)
        t_run = time.perf_counter()
        for _ in range(budget):
            if not action_set(state):
                break
            t0 = time.perf_counter()
            try:
                a = select(state)
                out = apply_intervention(state, truth, a)
            except CapacityError:
                status = "capacity_exceeded"
                break
            dt = time.perf_counter() - t0
            times.append(dt)
            oriented += out.oriented_count
            ratios.append(discovered_edge_ratio(total, oriented))
            state = out.next_state
            budget_left[0] -= 1
            if timeout is not None and dt > timeout:
                status = "timeout"
                break
        rho = (densities[gi] if densities is not None
               else truth.edge_count() / (truth.n * (truth.n - 1) / 2))
        records.append(RunRecord(graph_id=gid, strategy=kind.tag,
                                 ratios=ratios, select_seconds=times,
                                 total_seconds=time.perf_counter() - t_run,
                                 status=status, n=truth.n, rho=rho))
    return records


def write_eval_csv(records: Iterable[RunRecord], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(EVAL_HEADER)
        for rec in records:
            for step, ratio in enumerate(rec.ratios):
                ms = rec.select_seconds[step - 1] * 1000.0 if step else 0.0
                w.writerow([rec.graph_id, rec.strategy, step,
                            f"{ratio:.10g}", f"{ms:.6g}"])
