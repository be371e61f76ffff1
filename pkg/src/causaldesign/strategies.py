"""Intervention-target selection policies.

The learned Q-policy plus the classical heuristics (entropy, minimax,
average), a uniform-random reference, and an exhaustive expectimax
optimum for small instances. Oracle-backed heuristics score a candidate
from its own chain component only; comparisons across components are
made on the globally equivalent normalized objective.

Tie-breaking is everywhere by lowest node id, for reproducibility.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import CapacityError, NoActionError
from .graphs import Dag, Pdag, apply_intervention, chain_components
from .mec import (DEFAULT_CAP, ExtensionSet, orientation_masks,
                  outcome_partition)
from .model import ModelParams, score_all

STRATEGY_TAGS = ("random", "entropy", "minimax", "average", "learned",
                 "optimal")


@dataclass
class StrategyKind:
    """A strategy tag plus its strategy-specific settings."""
    tag: str
    cap: int = DEFAULT_CAP
    samples: Optional[int] = None   # Monte-Carlo draws for `average`
    model_path: Optional[str] = None
    params: Optional[ModelParams] = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.tag not in STRATEGY_TAGS:
            raise ValueError(f"unknown strategy tag {self.tag!r}")
        if self.tag == "learned" and self.params is None and self.model_path is None:
            raise ValueError("learned strategy needs model params")
        if self.tag in ("entropy", "minimax", "average", "optimal") and self.cap < 1:
            raise ValueError("oracle-backed strategies need cap >= 1")


def action_set(state: Pdag) -> list[int]:
    """Nodes with at least one undirected incident edge, ascending id."""
    return [v for v in range(state.n)
            if any(t == "u" for t in state.adjacency(v).values())]


def select_random(state: Pdag, rng: np.random.Generator) -> int:
    acts = action_set(state)
    if not acts:
        raise NoActionError("graph is fully oriented")
    return int(acts[int(rng.integers(len(acts)))])


def _argbest(candidates, key, maximize=True):
    """Best candidate under `key`; exact ties resolved by lowest id."""
    best_v, best_k = None, None
    for v in candidates:
        k = key(v)
        if best_k is None or (k > best_k if maximize else k < best_k):
            best_v, best_k = v, k
    return best_v


def _component_contexts(state: Pdag, cap: int):
    """Per chain component: (node list, component Pdag, masks, edge list)."""
    contexts = {}
    for comp in chain_components(state):
        if len(comp) < 2:
            continue
        sub = state.induced(comp)
        edges, masks = orientation_masks(sub, cap)
        ctx = (comp, sub, edges, masks)
        for v in comp:
            contexts[v] = ctx
    return contexts


def _component_map(state: Pdag):
    """Candidate node -> (component node list, induced component Pdag)."""
    out = {}
    for comp in chain_components(state):
        if len(comp) < 2:
            continue
        sub = state.induced(comp)
        for v in comp:
            out[v] = (comp, sub)
    return out


def select_entropy(state: Pdag, cap: int = DEFAULT_CAP) -> int:
    """Argmax of the Shannon entropy of the outcome-partition proportions."""
    acts = action_set(state)
    if not acts:
        raise NoActionError("graph is fully oriented")
    comps = _component_map(state)

    def entropy(v: int) -> float:
        comp, sub = comps[v]
        part = outcome_partition(sub, comp.index(v), cap)
        total = sum(len(c) for c in part.cells.values())
        h = 0.0
        for cell in part.cells.values():
            frac = len(cell) / total
            h -= frac * math.log(frac)
        return h

    return _argbest(acts, entropy, maximize=True)


def select_minimax(state: Pdag, cap: int = DEFAULT_CAP) -> int:
    """Argmin of the worst-case remaining equivalence-class size.

    Within one component the objective is the largest outcome cell; across
    components cell sizes are normalized by the component's own class size,
    which orders candidates exactly as the full-graph partition would.
    """
    acts = action_set(state)
    if not acts:
        raise NoActionError("graph is fully oriented")
    comps = _component_map(state)

    def worst(v: int) -> float:
        comp, sub = comps[v]
        local = comp.index(v)
        edges, masks = orientation_masks(sub, cap)
        inc = 0
        for i, (a, b) in enumerate(edges):
            if a == local or b == local:
                inc |= 1 << i
        counts: dict[int, int] = {}
        for m in masks:
            key = m & inc
            counts[key] = counts.get(key, 0) + 1
        return max(counts.values()) / len(masks)

    return _argbest(acts, worst, maximize=False)


def sample_extension_fast(g: Pdag, rng: np.random.Generator) -> Dag:
    """Random consistent extension of an undirected chordal graph.

    Eliminates a uniformly random simplicial vertex at each step (always
    possible on a chordal graph) and orients every edge against the
    elimination order, so each node's parents form a clique and the
    result is an acyclic, v-structure-free orientation. Not uniform over
    the class, so use only as a Monte-Carlo fallback.
    """
    n = g.n
    nbrs = [set(u for u, t in g.adjacency(v).items() if t == "u")
            for v in range(n)]
    live = [set(s) for s in nbrs]
    remaining = set(range(n))
    rank = {}
    for step in range(n):
        cands = [v for v in remaining
                 if all(b in live[a] for a in live[v] for b in live[v]
                        if a < b)]
        if not cands:
            raise RuntimeError("graph is not chordal")
        v = cands[int(rng.integers(len(cands)))]
        rank[v] = n - step  # eliminated first = latest in the vertex order
        remaining.discard(v)
        for u in live[v]:
            live[u].discard(v)
        live[v].clear()
    parents = [sorted(u for u in nbrs[v] if rank[u] < rank[v])
               for v in range(n)]
    return Dag(n, parents, validate=False)


def select_average(state: Pdag, samples: Optional[int] = None,
                   rng: Optional[np.random.Generator] = None,
                   cap: int = DEFAULT_CAP,
                   mc_enum_cap: int = 512) -> int:
    """Argmax of the expected number of newly oriented edges.

    With samples=None the expectation is exact over the enumerated class
    (capacity errors propagate). With a sample count, draws are uniform
    when the candidate's component enumerates under a small internal cap
    and otherwise fall back to fast non-uniform extension sampling.
    """
    acts = action_set(state)
    if not acts:
        raise NoActionError("graph is fully oriented")
    if samples is not None and rng is None:
        raise ValueError("Monte-Carlo mode needs an rng")

    from .mec import _dag_from_mask

    if samples is None:
        exact_ctx = _component_contexts(state, cap)

        def expected(v: int) -> float:
            comp, sub, edges, masks = exact_ctx[v]
            local = comp.index(v)
            tot = 0
            for m in masks:
                truth = _dag_from_mask(sub, edges, m)
                tot += apply_intervention(sub, truth, local).oriented_count
            return tot / len(masks)

        return _argbest(acts, expected, maximize=True)

    # Monte-Carlo mode: each component draws its truth sample once and all
    # of its candidates score against the same draws (common random
    # numbers), so exact ties produce identical estimates and the id
    # tie-break matches exact mode in the large-sample limit
    samplers = {}
    for comp in chain_components(state):
        if len(comp) < 2:
            continue
        sub = state.induced(comp)
        try:
            edges, masks = orientation_masks(sub, mc_enum_cap)
            draws = [_dag_from_mask(sub, edges,
                                    masks[int(rng.integers(len(masks)))])
                     for _ in range(samples)]
        except CapacityError:
            draws = [sample_extension_fast(sub, rng) for _ in range(samples)]
        ctx = (comp, sub, draws)
        for v in comp:
            samplers[v] = ctx

    stats = {}
    for v in acts:
        comp, sub, draws = samplers[v]
        local = comp.index(v)
        gains = np.array([apply_intervention(sub, d, local).oriented_count
                          for d in draws], dtype=float)
        stats[v] = (float(gains.mean()),
                    float(gains.std() / np.sqrt(samples)))
    # candidates whose estimate is within a confidence band of the best are
    # treated as tied, and the lowest id wins; as samples grow the band
    # shrinks to zero and the choice converges to the exact argmax
    best_mean = max(m for m, _ in stats.values())
    band = 3.0 * max(se for _, se in stats.values())
    return min(v for v, (m, _) in stats.items() if m >= best_mean - band)


def select_learned(state: Pdag, params: ModelParams) -> int:
    """Argmax of the learned score over the candidate set."""
    acts = action_set(state)
    if not acts:
        raise NoActionError("graph is fully oriented")
    scores = score_all(state, params)
    return _argbest(acts, lambda v: float(scores[v]), maximize=True)


@dataclass(frozen=True)
class OptimalPlan:
    value: float                # expected oriented-edge count over the budget
    action: Optional[int]       # an optimal first intervention


def plan_optimal(state: Pdag, truth_set: ExtensionSet, budget: int,
                 max_memo: int = 200_000) -> OptimalPlan:
    """Exhaustive expectimax over intervention sequences.

    Maximizes, over actions, the expectation over uniform class members
    of this step's oriented count plus the recursive value, to the given
    depth. Memoized on canonical (state, class, depth) encodings.
    """
    memo: dict = {}

    def sig(dag: Dag, und: list[tuple[int, int]]) -> tuple[int, ...]:
        return tuple(1 if dag.has_edge(u, v) else 0 for u, v in und)

    def solve(st: Pdag, exts: tuple[Dag, ...], depth: int):
        acts = action_set(st)
        if depth == 0 or not acts:
            return 0.0, None
        und = st.undirected_edges()
        key = (tuple(und), tuple(sorted(map(lambda d: sig(d, und), exts))),
               depth)
        if key in memo:
            return memo[key]
        if len(memo) > max_memo:
            raise CapacityError("optimal-plan memo table exceeded limit")
        n_ext = len(exts)
        best_val, best_act = -1.0, None
        for a in acts:
            groups: dict[Pdag, tuple[int, list[Dag]]] = {}
            for d in exts:
                out = apply_intervention(st, d, a)
                cnt, members = groups.get(out.next_state, (out.oriented_count, []))
                members.append(d)
                groups[out.next_state] = (cnt, members)
            val = 0.0
            for nxt, (cnt, members) in groups.items():
                sub_val, _ = solve(nxt, tuple(members), depth - 1)
                val += len(members) / n_ext * (cnt + sub_val)
            if val > best_val + 1e-12:
                best_val, best_act = val, a
        memo[key] = (best_val, best_act)
        return best_val, best_act

    if budget <= 0:
        return OptimalPlan(0.0, None)
    value, action = solve(state, tuple(truth_set.extensions), budget)
    return OptimalPlan(value, action)
