"""Mixed-graph representation and structural causal-graph algorithms.

A `Pdag` is a partially directed graph (the evolving essential graph),
a `Dag` is a fully directed acyclic graph (the ground truth). All types
are immutable after construction and all operations are pure functions.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import GraphError, InvalidStateError, UndefinedRatioError

# Orientation tags, stored on the unordered pair (u, v) with u < v.
UNDIRECTED = "u"
FORWARD = "f"  # u -> v (low id to high id)
BACKWARD = "b"  # v -> u


def _norm_pair(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


class Pdag:
    """Partially directed graph over nodes 0..n-1.

    Edge orientation is stored on the unordered pair with a 3-state tag,
    which makes same-skeleton checks O(1) per pair.
    """

    __slots__ = ("n", "_tags", "_adj", "_hash")

    def __init__(self, n: int, tags: dict[tuple[int, int], str]):
        if n < 0:
            raise GraphError(f"negative node count {n}")
        adj: list[dict[int, str]] = [dict() for _ in range(n)]
        for (u, v), tag in tags.items():
            if u == v:
                raise GraphError(f"self-loop at node {u}")
            if not (0 <= u < v < n):
                raise GraphError(f"bad edge pair ({u}, {v}) for n={n}")
            if tag not in (UNDIRECTED, FORWARD, BACKWARD):
                raise GraphError(f"bad orientation tag {tag!r}")
            if tag == UNDIRECTED:
                adj[u][v] = "u"
                adj[v][u] = "u"
            elif tag == FORWARD:
                adj[u][v] = ">"
                adj[v][u] = "<"
            else:
                adj[u][v] = "<"
                adj[v][u] = ">"
        self.n = n
        self._tags = dict(tags)
        self._adj = adj
        self._hash: int | None = None

    @classmethod
    def from_edges(cls, n: int,
                   undirected: Iterable[tuple[int, int]] = (),
                   directed: Iterable[tuple[int, int]] = ()) -> "Pdag":
        tags: dict[tuple[int, int], str] = {}
        for a, b in undirected:
            pair = _norm_pair(a, b)
            if pair in tags:
                raise GraphError(f"duplicate edge {pair}")
            tags[pair] = UNDIRECTED
        for a, b in directed:
            if a == b:
                raise GraphError(f"self-loop at node {a}")
            pair = _norm_pair(a, b)
            if pair in tags:
                raise GraphError(f"duplicate edge {pair}")
            tags[pair] = FORWARD if a < b else BACKWARD
        return cls(n, tags)

    @classmethod
    def _from_adj(cls, n: int, adj: list[dict[int, str]]) -> "Pdag":
        tags = {}
        for u in range(n):
            for v, t in adj[u].items():
                if u < v:
                    tags[(u, v)] = UNDIRECTED if t == "u" else (
                        FORWARD if t == ">" else BACKWARD)
        return cls(n, tags)

    # -- queries ---------------------------------------------------------

    def tag(self, a: int, b: int) -> str | None:
        """Orientation tag of the unordered pair, or None if not an edge."""
        return self._tags.get(_norm_pair(a, b))

    def has_edge(self, a: int, b: int) -> bool:
        return _norm_pair(a, b) in self._tags

    def points(self, a: int, b: int) -> bool:
        """True iff the directed edge a -> b is present."""
        return self._adj[a].get(b) == ">"

    def adjacency(self, v: int) -> dict[int, str]:
        """Neighbors of v tagged 'u' (undirected), '>' (v->nbr), '<' (nbr->v)."""
        return self._adj[v]

    def undirected_neighbors(self, v: int) -> list[int]:
        return sorted(u for u, t in self._adj[v].items() if t == "u")

    def parents(self, v: int) -> list[int]:
        return sorted(u for u, t in self._adj[v].items() if t == "<")

    def children(self, v: int) -> list[int]:
        return sorted(u for u, t in self._adj[v].items() if t == ">")

    def skeleton(self) -> list[tuple[int, int]]:
        return sorted(self._tags)

    def undirected_edges(self) -> list[tuple[int, int]]:
        return sorted(p for p, t in self._tags.items() if t == UNDIRECTED)

    def directed_edges(self) -> list[tuple[int, int]]:
        """Directed edges as (source, target) pairs."""
        out = []
        for (u, v), t in self._tags.items():
            if t == FORWARD:
                out.append((u, v))
            elif t == BACKWARD:
                out.append((v, u))
        return sorted(out)

    def edge_count(self) -> int:
        return len(self._tags)

    def is_chain_graph(self) -> bool:
        """True iff the graph has no partially directed cycle.

        Equivalent check: contracting every undirected component must
        leave an acyclic graph over the components.
        """
        comp_of = {}
        for i, comp in enumerate(chain_components(self)):
            for v in comp:
                comp_of[v] = i
        succ: dict[int, set[int]] = {}
        for a, b in self.directed_edges():
            ca, cb = comp_of[a], comp_of[b]
            if ca == cb:
                return False
            succ.setdefault(ca, set()).add(cb)
        # cycle check over the component graph
        seen: dict[int, int] = {}

        def dfs(c: int) -> bool:
            seen[c] = 1
            for d in succ.get(c, ()):
                state = seen.get(d, 0)
                if state == 1 or (state == 0 and dfs(d)):
                    return True
            seen[c] = 2
            return False

        return not any(dfs(c) for c in list(succ) if seen.get(c, 0) == 0)

    # -- derivation ------------------------------------------------------

    def orient(self, arcs: Iterable[tuple[int, int]]) -> "Pdag":
        """New graph with each (src, dst) arc directed; pairs must exist."""
        tags = dict(self._tags)
        for s, d in arcs:
            pair = _norm_pair(s, d)
            if pair not in tags:
                raise GraphError(f"no edge {pair} to orient")
            want = FORWARD if s < d else BACKWARD
            if tags[pair] != UNDIRECTED and tags[pair] != want:
                raise InvalidStateError(f"edge {pair} already directed {tags[pair]}")
            tags[pair] = want
        return Pdag(self.n, tags)

    def drop_directed(self) -> "Pdag":
        """New graph keeping only the undirected edges."""
        return Pdag(self.n, {p: t for p, t in self._tags.items()
                             if t == UNDIRECTED})

    def induced(self, nodes: Sequence[int]) -> "Pdag":
        """Subgraph induced by `nodes`, relabeled to 0..k-1 in given order."""
        idx = {v: i for i, v in enumerate(nodes)}
        tags = {}
        for (u, v), t in self._tags.items():
            if u in idx and v in idx:
                a, b = idx[u], idx[v]
                if a < b:
                    tags[(a, b)] = t
                else:
                    flip = {FORWARD: BACKWARD, BACKWARD: FORWARD,
                            UNDIRECTED: UNDIRECTED}
                    tags[(b, a)] = flip[t]
        return Pdag(len(nodes), tags)

    def relabel(self, perm: Sequence[int]) -> "Pdag":
        """Apply the node permutation v -> perm[v]."""
        tags = {}
        for (u, v), t in self._tags.items():
            a, b = perm[u], perm[v]
            if a > b:
                t = {FORWARD: BACKWARD, BACKWARD: FORWARD,
                     UNDIRECTED: UNDIRECTED}[t]
                a, b = b, a
            tags[(a, b)] = t
        return Pdag(self.n, tags)

    # -- serialization ---------------------------------------------------

    def to_json_obj(self) -> dict:
        return {"n": self.n,
                "edges": [[u, v, t] for (u, v), t in sorted(self._tags.items())]}

    @classmethod
    def from_json_obj(cls, obj: dict) -> "Pdag":
        tags = {}
        for u, v, t in obj["edges"]:
            pair = _norm_pair(int(u), int(v))
            if (int(u), int(v)) != pair and t in (FORWARD, BACKWARD):
                t = FORWARD if t == BACKWARD else BACKWARD
            if pair in tags:
                raise GraphError(f"duplicate edge {pair}")
            tags[pair] = t
        return cls(int(obj["n"]), tags)

    # -- dunder ----------------------------------------------------------

    def __eq__(self, other) -> bool:
        return (isinstance(other, Pdag) and self.n == other.n
                and self._tags == other._tags)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, tuple(sorted(self._tags.items()))))
        return self._hash

    def __repr__(self) -> str:
        return f"Pdag(n={self.n}, edges={sorted(self._tags.items())})"


class Dag:
    """Directed acyclic graph given by per-node parent lists."""

    __slots__ = ("n", "parents", "_adjsets", "_hash")

    def __init__(self, n: int, parents: Sequence[Sequence[int]],
                 validate: bool = True):
        if len(parents) != n:
            raise GraphError(f"expected {n} parent lists, got {len(parents)}")
        self.n = n
        self.parents = tuple(tuple(ps) for ps in parents)
        if validate:
            for v, ps in enumerate(self.parents):
                if v in ps:
                    raise GraphError(f"self-parenting at node {v}")
                if len(set(ps)) != len(ps):
                    raise GraphError(f"duplicate parents at node {v}")
                if any(not 0 <= p < n for p in ps):
                    raise GraphError(f"parent out of range at node {v}")
            self.topological_order()  # raises on cycle
        adjsets = [set() for _ in range(n)]
        for v, ps in enumerate(self.parents):
            for p in ps:
                adjsets[v].add(p)
                adjsets[p].add(v)
        self._adjsets = adjsets
        self._hash: int | None = None

    def topological_order(self) -> list[int]:
        indeg = [len(ps) for ps in self.parents]
        children: list[list[int]] = [[] for _ in range(self.n)]
        for v, ps in enumerate(self.parents):
            for p in ps:
                children[p].append(v)
        order = [v for v in range(self.n) if indeg[v] == 0]
        i = 0
        while i < len(order):
            for c in children[order[i]]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    order.append(c)
            i += 1
        if len(order) != self.n:
            raise GraphError("graph contains a directed cycle")
        return order

    def edges(self) -> list[tuple[int, int]]:
        """Directed edges as (parent, child)."""
        return sorted((p, v) for v, ps in enumerate(self.parents) for p in ps)

    def has_edge(self, a: int, b: int) -> bool:
        """True iff a -> b."""
        return a in self.parents[b]

    def adjacent(self, a: int, b: int) -> bool:
        return b in self._adjsets[a]

    def skeleton(self) -> list[tuple[int, int]]:
        return sorted(_norm_pair(p, v)
                      for v, ps in enumerate(self.parents) for p in ps)

    def edge_count(self) -> int:
        return sum(len(ps) for ps in self.parents)

    def to_pdag(self) -> Pdag:
        return Pdag.from_edges(self.n, directed=self.edges())

    def relabel(self, perm: Sequence[int]) -> "Dag":
        parents: list[list[int]] = [[] for _ in range(self.n)]
        for v, ps in enumerate(self.parents):
            parents[perm[v]] = sorted(perm[p] for p in ps)
        return Dag(self.n, parents, validate=False)

    def to_json_obj(self) -> dict:
        return {"n": self.n, "parents": [list(ps) for ps in self.parents]}

    @classmethod
    def from_json_obj(cls, obj: dict) -> "Dag":
        return cls(int(obj["n"]), obj["parents"])

    def __eq__(self, other) -> bool:
        return (isinstance(other, Dag) and self.n == other.n
                and self.parents == other.parents)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, self.parents))
        return self._hash

    def __repr__(self) -> str:
        return f"Dag(n={self.n}, edges={self.edges()})"


@dataclass(frozen=True)
class InterventionOutcome:
    """Result of one perfect single-node intervention."""
    next_state: Pdag
    oriented_count: int
    oriented_edges: tuple[tuple[int, int], ...]


# ---------------------------------------------------------------------------
# structural algorithms
# ---------------------------------------------------------------------------

def v_structures(dag: Dag) -> set[tuple[int, int, int]]:
    """All colliders a -> c <- b with a, b non-adjacent, canonically a < b."""
    out = set()
    for c in range(dag.n):
        ps = dag.parents[c]
        for i in range(len(ps)):
            for j in range(i + 1, len(ps)):
                a, b = _norm_pair(ps[i], ps[j])
                if not dag.adjacent(a, b):
                    out.add((a, c, b))
    return out


def _scan_rule1(adj):
    demands = []
    for b, nbrs in enumerate(adj):
        parents = [a for a, t in nbrs.items() if t == "<"]
        if not parents:
            continue
        for c, t in nbrs.items():
            if t != "u":
                continue
            for a in parents:
                if a != c and c not in adj[a]:
                    demands.append((b, c))
                    break
    return demands


def _scan_rule2(adj):
    demands = []
    for c, nbrs in enumerate(adj):
        parents = [a for a, t in nbrs.items() if t == "<"]
        children = [b for b, t in nbrs.items() if t == ">"]
        for a in parents:
            for b in children:
                if adj[a].get(b) == "u":
                    demands.append((a, b))
    return demands


def _scan_rule3(adj):
    demands = []
    for a, nbrs in enumerate(adj):
        und = [x for x, t in nbrs.items() if t == "u"]
        if len(und) < 3:
            continue
        uset = set(und)
        for b in und:
            ps = [p for p, t in adj[b].items() if t == "<" and p in uset]
            done = False
            for i in range(len(ps)):
                for j in range(i + 1, len(ps)):
                    if ps[j] not in adj[ps[i]]:
                        demands.append((a, b))
                        done = True
                        break
                if done:
                    break
    return demands


def _scan_rule4(adj):
    # a-b, a-c, c->d, d->b, c and b non-adjacent  =>  a->b
    demands = []
    for a, nbrs in enumerate(adj):
        und = [x for x, t in nbrs.items() if t == "u"]
        if len(und) < 2:
            continue
        uset = set(und)
        for b in und:
            found = False
            for d, t in adj[b].items():
                if t != "<":
                    continue
                for c, t2 in adj[d].items():
                    if t2 == "<" and c in uset and c != b and b not in adj[c]:
                        demands.append((a, b))
                        found = True
                        break
                if found:
                    break
    return demands


_RULES = {1: _scan_rule1, 2: _scan_rule2, 3: _scan_rule3, 4: _scan_rule4}


def _apply_demands(adj, demands) -> bool:
    """Orient demanded arcs in place; raise on conflicting orientations."""
    changed = False
    wanted: dict[tuple[int, int], tuple[int, int]] = {}
    for s, d in demands:
        pair = _norm_pair(s, d)
        prev = wanted.get(pair)
        if prev is not None and prev != (s, d):
            raise InvalidStateError(
                f"rules force both orientations of edge {pair}")
        wanted[pair] = (s, d)
    for s, d in wanted.values():
        t = adj[s].get(d)
        if t == ">":
            continue
        if t == "<":
            raise InvalidStateError(
                f"rule demands {s}->{d} but edge is directed {d}->{s}")
        adj[s][d] = ">"
        adj[d][s] = "<"
        changed = True
    return changed


def _close_adj(adj, rule_order=(1, 2, 3, 4)) -> None:
    changed = True
    while changed:
        changed = False
        for r in rule_order:
            if _apply_demands(adj, _RULES[r](adj)):
                changed = True


def meek_closure(g: Pdag, rule_order: Sequence[int] = (1, 2, 3, 4)) -> Pdag:
    """Fixed point of the four orientation-propagation rules.

    Monotone (never un-directs an edge), idempotent, and invariant to the
    rule application order. Raises InvalidStateError if the rules would
    force both orientations of a single edge.
    """
    adj = [dict(d) for d in g._adj]
    _close_adj(adj, rule_order)
    return Pdag._from_adj(g.n, adj)


def cpdag_from_dag(dag: Dag) -> Pdag:
    """Essential graph: skeleton + v-structure arcs, closed under the rules."""
    adj: list[dict[int, str]] = [dict() for _ in range(dag.n)]
    for u, v in dag.skeleton():
        adj[u][v] = "u"
        adj[v][u] = "u"
    for a, c, b in v_structures(dag):
        adj[a][c] = ">"
        adj[c][a] = "<"
        adj[b][c] = ">"
        adj[c][b] = "<"
    _close_adj(adj)
    return Pdag._from_adj(dag.n, adj)


def chain_components(g: Pdag) -> list[list[int]]:
    """Connected components of the undirected subgraph, singletons included.

    Deterministic: components sorted by smallest member, members ascending.
    """
    seen = [False] * g.n
    comps = []
    for start in range(g.n):
        if seen[start]:
            continue
        stack = [start]
        seen[start] = True
        comp = []
        while stack:
            v = stack.pop()
            comp.append(v)
            for u, t in g._adj[v].items():
                if t == "u" and not seen[u]:
                    seen[u] = True
                    stack.append(u)
        comps.append(sorted(comp))
    return sorted(comps, key=lambda c: c[0])


def is_chordal(g: Pdag) -> bool:
    """Chordality of the undirected subgraph (maximum-cardinality search)."""
    nbrs = [set(u for u, t in g._adj[v].items() if t == "u")
            for v in range(g.n)]
    n = g.n
    weight = [0] * n
    pos = [-1] * n
    order = []
    remaining = set(range(n))
    for i in range(n):
        v = max(remaining, key=lambda x: (weight[x], -x))
        remaining.remove(v)
        pos[v] = i
        order.append(v)
        for u in nbrs[v]:
            if u in remaining:
                weight[u] += 1
    # perfect-elimination verification on the reversed MCS order
    for v in order:
        earlier = [u for u in nbrs[v] if pos[u] < pos[v]]
        if not earlier:
            continue
        w = max(earlier, key=lambda u: pos[u])
        for u in earlier:
            if u != w and u not in nbrs[w]:
                return False
    return True


def apply_intervention(state: Pdag, truth: Dag, v: int) -> InterventionOutcome:
    """Orient all undirected edges at v per the ground truth, then close.

    Counts only undirected -> directed transitions. The returned next
    state keeps only the edges that are still undirected afterwards.
    """
    if not 0 <= v < state.n:
        raise GraphError(f"node {v} out of range for n={state.n}")
    adj = [dict(d) for d in state._adj]
    for u, t in state._adj[v].items():
        if t != "u":
            continue
        if truth.has_edge(u, v):
            adj[u][v] = ">"
            adj[v][u] = "<"
        elif truth.has_edge(v, u):
            adj[v][u] = ">"
            adj[u][v] = "<"
        else:
            raise GraphError(f"edge ({u}, {v}) absent from ground truth")
    _close_adj(adj)
    oriented = []
    for u in range(state.n):
        for w, t in adj[u].items():
            if t == ">" and state._adj[u].get(w) == "u":
                oriented.append((u, w))
    next_tags = {}
    for u in range(state.n):
        for w, t in adj[u].items():
            if t == "u" and u < w:
                next_tags[(u, w)] = UNDIRECTED
    return InterventionOutcome(next_state=Pdag(state.n, next_tags),
                               oriented_count=len(oriented),
                               oriented_edges=tuple(sorted(oriented)))


def discovered_edge_ratio(total_edges: int, oriented_so_far: int) -> float:
    """Fraction of edges whose orientation is known, in [0, 1]."""
    if total_edges <= 0:
        raise UndefinedRatioError("graph has no edges")
    if not 0 <= oriented_so_far <= total_edges:
        raise ValueError(
            f"oriented count {oriented_so_far} outside [0, {total_edges}]")
    return oriented_so_far / total_edges
