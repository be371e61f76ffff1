"""Exact Markov-equivalence-class machinery for small chain components.

Consistent extensions are found by backtracking over undirected-edge
orientations with incremental acyclicity and v-structure pruning. This
module is the correctness oracle for the essential-graph code and the
engine behind the heuristic baselines.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapacityError
from .graphs import Dag, Pdag, chain_components

DEFAULT_CAP = 100_000


@dataclass(frozen=True)
class ExtensionSet:
    """All consistent DAG extensions of a chain graph, in canonical order."""
    base: Pdag
    extensions: tuple[Dag, ...]


@dataclass(frozen=True)
class OutcomePartition:
    """Extensions grouped by the orientation pattern around one node."""
    node: int
    cells: dict[str, tuple[int, ...]]


def orientation_masks(g: Pdag, cap: int = DEFAULT_CAP,
                      edges: list[tuple[int, int]] | None = None) -> tuple[list[tuple[int, int]], list[int]]:
    """Enumerate consistent orientations of `edges` (default: all undirected).

    Returns the edge list and one bitmask per extension; bit i set means
    edges[i] = (u, v) is oriented v -> u (high id to low id). Directed
    edges of g are kept fixed and taken into account for both the cycle
    and the new-v-structure pruning. Raises CapacityError past `cap`.
    """
    if edges is None:
        edges = g.undirected_edges()
    n = g.n
    skel = [set(g.adjacency(v)) for v in range(n)]
    parents = [set(g.parents(v)) for v in range(n)]
    children = [set(g.children(v)) for v in range(n)]
    masks: list[int] = []

    def reaches(src: int, dst: int) -> bool:
        stack = [src]
        seen = {src}
        while stack:
            x = stack.pop()
            if x == dst:
                return True
            for y in children[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return False

    def ok(s: int, t: int) -> bool:
        # no new collider at t with a non-adjacent co-parent
        for w in parents[t]:
            if w != s and s not in skel[w]:
                return False
        # no directed cycle through s -> t
        return not reaches(t, s)

    m = len(edges)

    def assign(i: int, mask: int) -> None:
        if i == m:
            if len(masks) >= cap:
                raise CapacityError(
                    f"extension count exceeds cap of {cap}")
            masks.append(mask)
            return
        u, v = edges[i]
        for s, t, bit in ((u, v, 0), (v, u, 1 << i)):
            if ok(s, t):
                parents[t].add(s)
                children[s].add(t)
                assign(i + 1, mask | bit)
                parents[t].discard(s)
                children[s].discard(t)

    assign(0, 0)
    return edges, masks


def _dag_from_mask(g: Pdag, edges: list[tuple[int, int]], mask: int) -> Dag:
    parents: list[list[int]] = [list(g.parents(v)) for v in range(g.n)]
    for i, (u, v) in enumerate(edges):
        if mask & (1 << i):
            parents[u].append(v)
        else:
            parents[v].append(u)
    return Dag(g.n, [sorted(ps) for ps in parents], validate=False)


def enumerate_extensions(g: Pdag, cap: int = DEFAULT_CAP) -> ExtensionSet:
    """All DAGs extending g with no new v-structure and no cycle."""
    edges, masks = orientation_masks(g, cap)
    return ExtensionSet(base=g,
                        extensions=tuple(_dag_from_mask(g, edges, m)
                                         for m in masks))


def mec_size(g: Pdag, cap: int = DEFAULT_CAP) -> int:
    """Number of consistent extensions (product over chain components)."""
    total = 1
    und = g.undirected_edges()
    for comp in chain_components(g):
        if len(comp) < 2:
            continue
        cset = set(comp)
        comp_edges = [e for e in und if e[0] in cset]
        if not comp_edges:
            continue
        _, masks = orientation_masks(g, cap, edges=comp_edges)
        total *= len(masks)
        if total > cap:
            raise CapacityError(f"extension count exceeds cap of {cap}")
    return total


def sample_uniform(g: Pdag, rng: np.random.Generator,
                   cap: int = DEFAULT_CAP) -> Dag:
    """Uniformly random member of the extension set."""
    edges, masks = orientation_masks(g, cap)
    return _dag_from_mask(g, edges, masks[int(rng.integers(len(masks)))])


def incident_pattern(dag: Dag, g: Pdag, v: int) -> str:
    """Canonical string encoding the orientation of every edge at v."""
    parts = []
    for u in sorted(g.adjacency(v)):
        a, b = (u, v) if u < v else (v, u)
        parts.append(f"{a}-{b}:{'f' if dag.has_edge(a, b) else 'b'}")
    return ";".join(parts)


def outcome_partition(g: Pdag, v: int,
                      cap: int = DEFAULT_CAP) -> OutcomePartition:
    """Group the extensions of g by the orientation pattern around v."""
    ext = enumerate_extensions(g, cap)
    cells: dict[str, list[int]] = {}
    for i, dag in enumerate(ext.extensions):
        cells.setdefault(incident_pattern(dag, g, v), []).append(i)
    return OutcomePartition(node=v,
                            cells={k: tuple(ix) for k, ix in cells.items()})
