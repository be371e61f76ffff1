"""Graph-embedding Q-function: forward evaluation and exact gradients.

The embedding network runs L synchronous sum-aggregation message-passing
layers with a ReLU combine; the score network pools all node embeddings
and scores each candidate node. Gradients for the TD loss are derived by
hand (no autodiff framework) and checked against finite differences in
the test suite. ReLU subgradient at exactly 0 is taken as 0.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .graphs import Pdag

CHECKPOINT_VERSION = 1


@dataclass
class ModelParams:
    """The five parameter blocks of the embedding and score networks."""
    p: int
    q: int
    L: int
    theta1: np.ndarray  # (p, q)
    theta2: np.ndarray  # (p, p)
    theta3: np.ndarray  # (2p,)
    theta4: np.ndarray  # (p, p)
    theta5: np.ndarray  # (p, p)

    BLOCKS = ("theta1", "theta2", "theta3", "theta4", "theta5")

    def validate(self) -> None:
        p, q = self.p, self.q
        shapes = {"theta1": (p, q), "theta2": (p, p), "theta3": (2 * p,),
                  "theta4": (p, p), "theta5": (p, p)}
        for name, shape in shapes.items():
            arr = getattr(self, name)
            if arr.shape != shape:
                raise ValueError(f"{name} has shape {arr.shape}, want {shape}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite entries")
        if self.L < 1:
            raise ValueError("need at least one message-passing layer")

    def copy(self) -> "ModelParams":
        return ModelParams(self.p, self.q, self.L,
                           *(getattr(self, b).copy() for b in self.BLOCKS))

    def to_json_obj(self) -> dict:
        obj = {"format_version": CHECKPOINT_VERSION,
               "p": self.p, "q": self.q, "L": self.L}
        for b in self.BLOCKS:
            obj[b] = getattr(self, b).ravel().tolist()
        return obj

    @classmethod
    def from_json_obj(cls, obj: dict) -> "ModelParams":
        if obj.get("format_version") != CHECKPOINT_VERSION:
            raise ValueError(
                f"unsupported checkpoint version {obj.get('format_version')}")
        p, q, L = int(obj["p"]), int(obj["q"]), int(obj["L"])
        shapes = {"theta1": (p, q), "theta2": (p, p), "theta3": (2 * p,),
                  "theta4": (p, p), "theta5": (p, p)}
        blocks = {b: np.asarray(obj[b], dtype=float).reshape(shapes[b])
                  for b in cls.BLOCKS}
        params = cls(p, q, L, **blocks)
        params.validate()
        return params

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json_obj()))

    @classmethod
    def load(cls, path: str | Path) -> "ModelParams":
        return cls.from_json_obj(json.loads(Path(path).read_text()))


def init_params(p: int = 32, q: int = 1, L: int = 4,
                rng: np.random.Generator | None = None) -> ModelParams:
    """Standard-normal init scaled by 1/sqrt(p) to keep activations tame."""
    if rng is None:
        rng = np.random.default_rng()
    s = 1.0 / np.sqrt(p)
    params = ModelParams(
        p, q, L,
        theta1=rng.standard_normal((p, q)) * s,
        theta2=rng.standard_normal((p, p)) * s,
        theta3=rng.standard_normal(2 * p) * s,
        theta4=rng.standard_normal((p, p)) * s,
        theta5=rng.standard_normal((p, p)) * s,
    )
    params.validate()
    return params


def zero_grads(params: ModelParams) -> dict[str, np.ndarray]:
    return {b: np.zeros_like(getattr(params, b)) for b in ModelParams.BLOCKS}


@dataclass
class EmbeddingTable:
    """Final per-node embeddings plus cached activations for backprop."""
    features: np.ndarray        # (n, q) node features W_v (all ones)
    adjacency: np.ndarray       # (n, n) undirected 0/1 matrix
    pre: list[np.ndarray]       # per layer (n, p) pre-activations
    layers: list[np.ndarray]    # [H^0 .. H^L], each (n, p); H^0 is zero

    @property
    def embeddings(self) -> np.ndarray:
        return self.layers[-1]


def _adjacency_matrix(state: Pdag) -> np.ndarray:
    a = np.zeros((state.n, state.n))
    for u, v in state.undirected_edges():
        a[u, v] = 1.0
        a[v, u] = 1.0
    return a


def embed(state: Pdag, params: ModelParams) -> EmbeddingTable:
    """L rounds of h_v = ReLU(theta1 W_v + theta2 * sum of neighbor h_u).

    h^(0) lives in the q-dimensional feature space while theta2 acts on
    p-dimensional embeddings, so the layer-1 neighbor sum starts from the
    zero p-vector; node features enter every layer through theta1.
    """
    params.validate()
    n = state.n
    w = np.ones((n, params.q))
    a = _adjacency_matrix(state)
    base = w @ params.theta1.T
    layers = [np.zeros((n, params.p))]
    pre = []
    h = layers[0]
    for _ in range(params.L):
        z = base + (a @ h) @ params.theta2.T
        h = np.maximum(z, 0.0)
        pre.append(z)
        layers.append(h)
    return EmbeddingTable(features=w, adjacency=a, pre=pre, layers=layers)


def score_all(state: Pdag, params: ModelParams,
              table: EmbeddingTable | None = None) -> np.ndarray:
    """Q-hat(state, v) for every node v; pooling sums over all nodes."""
    if table is None:
        table = embed(state, params)
    h = table.embeddings
    pooled = params.theta4 @ h.sum(axis=0)          # (p,)
    per_node = h @ params.theta5.T                  # (n, p)
    z = np.concatenate([np.tile(pooled, (state.n, 1)), per_node], axis=1)
    return np.maximum(z, 0.0) @ params.theta3


def score_with_grad(state: Pdag, action: int, params: ModelParams
                    ) -> tuple[float, dict[str, np.ndarray]]:
    """Q-hat(state, action) and its gradient w.r.t. all five blocks."""
    table = embed(state, params)
    h = table.embeddings
    p = params.p
    s = h.sum(axis=0)
    m4 = params.theta4 @ s
    m5 = params.theta5 @ h[action]
    z = np.concatenate([m4, m5])
    u = np.maximum(z, 0.0)
    score = float(params.theta3 @ u)

    grads = zero_grads(params)
    du = params.theta3 * (z > 0.0)
    du4, du5 = du[:p], du[p:]
    grads["theta3"] = u
    grads["theta4"] = np.outer(du4, s)
    grads["theta5"] = np.outer(du5, h[action])
    # gradient flowing into the final-layer embeddings
    gh = np.tile(params.theta4.T @ du4, (state.n, 1))
    gh[action] += params.theta5.T @ du5
    a = table.adjacency
    for layer in range(params.L, 0, -1):
        d = gh * (table.pre[layer - 1] > 0.0)       # (n, p)
        grads["theta1"] += d.T @ table.features
        grads["theta2"] += d.T @ (a @ table.layers[layer - 1])
        gh = a @ (d @ params.theta2)
    return score, grads


def td_loss_grad(batch, params: ModelParams, gamma: float
                 ) -> tuple[float, dict[str, np.ndarray]]:
    """Semi-gradient TD loss over a batch of transitions.

    Targets y = r + gamma * max_a Q(next, a) are treated as constants;
    terminal transitions (or next states with no candidate action) use
    y = r. Returns (mean squared error, mean gradient).
    """
    from .strategies import action_set  # local import avoids a cycle

    if not batch:
        raise ValueError("empty batch")
    params.validate()
    loss = 0.0
    grads = zero_grads(params)
    for tr in batch:
        if tr.terminal:
            y = float(tr.reward)
        else:
            acts = action_set(tr.next_state)
            if acts:
                scores = score_all(tr.next_state, params)
                y = float(tr.reward) + gamma * float(max(scores[a] for a in acts))
            else:
                y = float(tr.reward)
        pred, g = score_with_grad(tr.state, tr.action, params)
        err = pred - y
        if not np.isfinite(err):
            raise FloatingPointError("non-finite TD error")
        loss += err * err
        scale = 2.0 * err
        for b in ModelParams.BLOCKS:
            grads[b] += scale * g[b]
    k = len(batch)
    loss /= k
    for b in ModelParams.BLOCKS:
        grads[b] /= k
    return loss, grads
