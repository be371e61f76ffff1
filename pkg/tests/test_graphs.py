"""Mixed-graph types, Meek closure, essential graphs, interventions."""
from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from causaldesign import (Dag, GraphError, InvalidStateError, Pdag,
                          UndefinedRatioError, apply_intervention,
                          chain_components, cpdag_from_dag,
                          discovered_edge_ratio, is_chordal, meek_closure,
                          v_structures)
from causaldesign.graphs import _norm_pair

from conftest import random_dag


# -- representation ----------------------------------------------------------

class TestPdag:
    def test_tags_and_queries(self):
        g = Pdag.from_edges(4, undirected=[(0, 1)], directed=[(1, 2), (3, 2)])
        assert g.tag(0, 1) == "u" and g.tag(1, 0) == "u"
        assert g.points(1, 2) and not g.points(2, 1)
        assert g.parents(2) == [1, 3]
        assert g.children(1) == [2]
        assert g.undirected_neighbors(1) == [0]
        assert g.skeleton() == [(0, 1), (1, 2), (2, 3)]
        assert g.directed_edges() == [(1, 2), (3, 2)]
        assert g.edge_count() == 3

    def test_rejects_bad_edges(self):
        with pytest.raises(GraphError):
            Pdag.from_edges(2, undirected=[(0, 0)])
        with pytest.raises(GraphError):
            Pdag.from_edges(2, undirected=[(0, 3)])
        with pytest.raises(GraphError):
            Pdag.from_edges(3, undirected=[(0, 1)], directed=[(1, 0)])

    def test_orient_and_drop(self):
        g = Pdag.from_edges(3, undirected=[(0, 1), (1, 2)])
        h = g.orient([(1, 0)])
        assert h.points(1, 0)
        assert h.drop_directed().skeleton() == [(1, 2)]
        with pytest.raises(InvalidStateError):
            h.orient([(0, 1)])
        with pytest.raises(GraphError):
            g.orient([(0, 2)])

    def test_induced_relabels_consistently(self):
        g = Pdag.from_edges(4, undirected=[(1, 3)], directed=[(3, 2)])
        sub = g.induced([3, 2, 1])
        assert sub.points(0, 1)
        assert sub.tag(0, 2) == "u"

    def test_json_round_trip(self):
        g = Pdag.from_edges(4, undirected=[(0, 3)], directed=[(2, 1)])
        assert Pdag.from_json_obj(g.to_json_obj()) == g

    def test_hash_eq(self):
        a = Pdag.from_edges(3, undirected=[(0, 1)])
        b = Pdag.from_edges(3, undirected=[(1, 0)])
        assert a == b and hash(a) == hash(b)
        assert a != Pdag.from_edges(3, directed=[(0, 1)])

    def test_is_chain_graph(self):
        ok = Pdag.from_edges(3, undirected=[(0, 1)], directed=[(1, 2)])
        assert ok.is_chain_graph()
        # partially directed cycle: 0-1 undirected, 0->2, 2->1
        bad = Pdag.from_edges(3, undirected=[(0, 1)], directed=[(0, 2), (2, 1)])
        assert not bad.is_chain_graph()


class TestDag:
    def test_cycle_rejected(self):
        with pytest.raises(GraphError):
            Dag(3, [[2], [0], [1]])

    def test_validation(self):
        with pytest.raises(GraphError):
            Dag(2, [[0], []])
        with pytest.raises(GraphError):
            Dag(2, [[], [0, 0]])
        with pytest.raises(GraphError):
            Dag(2, [[], [5]])

    def test_topological_order(self):
        d = Dag(4, [[], [0], [1], [2]])
        order = d.topological_order()
        pos = {v: i for i, v in enumerate(order)}
        for p, v in d.edges():
            assert pos[p] < pos[v]

    def test_queries(self, worked_dag_five):
        d = worked_dag_five
        assert d.has_edge(1, 2) and not d.has_edge(2, 1)
        assert d.adjacent(1, 3) and not d.adjacent(0, 4)
        assert d.skeleton() == [(0, 1), (1, 2), (1, 3), (2, 3), (3, 4)]
        assert d.edge_count() == 5

    def test_json_round_trip(self, worked_dag_five):
        assert Dag.from_json_obj(worked_dag_five.to_json_obj()) == worked_dag_five


# -- v-structures and essential graphs ---------------------------------------

def test_v_structures_worked_example(worked_dag_five):
    assert v_structures(worked_dag_five) == {(1, 3, 4)}


def test_v_structure_requires_nonadjacent_coparents(triangle_dag):
    assert v_structures(triangle_dag) == set()


def test_cpdag_worked_example(worked_dag_five):
    cp = cpdag_from_dag(worked_dag_five)
    assert cp.tag(0, 1) == "u"
    assert sorted(cp.directed_edges()) == [(1, 2), (1, 3), (3, 2), (4, 3)]


def test_cpdag_of_collider():
    cp = cpdag_from_dag(Dag(3, [[], [], [0, 1]]))
    assert cp.directed_edges() == [(0, 2), (1, 2)]
    assert not cp.undirected_edges()


def test_cpdag_of_chain_is_undirected():
    cp = cpdag_from_dag(Dag(3, [[], [0], [1]]))
    assert not cp.directed_edges()
    assert cp.undirected_edges() == [(0, 1), (1, 2)]


def test_cpdag_determined_by_skeleton_and_v_structures():
    rng = np.random.default_rng(7)
    seen: dict[tuple, Pdag] = {}
    for _ in range(300):
        d = random_dag(rng, 5, 0.4)
        key = (tuple(d.skeleton()), tuple(sorted(v_structures(d))))
        cp = cpdag_from_dag(d)
        if key in seen:
            assert seen[key] == cp
        else:
            seen[key] = cp


# -- Meek closure properties -------------------------------------------------

def _chain_with_background(rng: np.random.Generator, n: int) -> Pdag:
    """Essential-graph chain part plus a few truth-consistent arcs."""
    truth = random_dag(rng, n, 0.5)
    state = cpdag_from_dag(truth).drop_directed()
    und = state.undirected_edges()
    arcs = []
    for u, v in und:
        if rng.random() < 0.3:
            arcs.append((u, v) if truth.has_edge(u, v) else (v, u))
    return state.orient(arcs)


@given(st.integers(0, 10_000))
@settings(max_examples=60, deadline=None)
def test_meek_closure_idempotent_and_monotone(seed):
    rng = np.random.default_rng(seed)
    g = _chain_with_background(rng, 6)
    closed = meek_closure(g)
    assert meek_closure(closed) == closed
    assert set(g.directed_edges()) <= set(closed.directed_edges())
    assert closed.skeleton() == g.skeleton()


@given(st.integers(0, 10_000), st.permutations([1, 2, 3, 4]))
@settings(max_examples=60, deadline=None)
def test_meek_closure_rule_order_invariant(seed, order):
    rng = np.random.default_rng(seed)
    g = _chain_with_background(rng, 6)
    assert meek_closure(g, rule_order=order) == meek_closure(g)


def test_meek_rule1():
    g = Pdag.from_edges(3, undirected=[(1, 2)], directed=[(0, 1)])
    assert meek_closure(g).points(1, 2)


def test_meek_rule2():
    g = Pdag.from_edges(3, undirected=[(0, 2)], directed=[(0, 1), (1, 2)])
    assert meek_closure(g).points(0, 2)


def test_meek_rule3():
    g = Pdag.from_edges(4, undirected=[(0, 1), (0, 2), (0, 3)],
                        directed=[(1, 3), (2, 3)])
    assert meek_closure(g).points(0, 3)


def test_meek_rule4():
    # 0-1, 0-2, 0-3 undirected; 2->3->1 directed; 1 and 2 non-adjacent
    g = Pdag.from_edges(4, undirected=[(0, 1), (0, 2), (0, 3)],
                        directed=[(2, 3), (3, 1)])
    closed = meek_closure(g)
    assert closed.points(0, 1)


def test_meek_conflict_detected():
    # both orientations of 0-1 forced by two opposing rule-1 patterns
    g = Pdag.from_edges(4, undirected=[(0, 1)], directed=[(2, 0), (3, 1)])
    with pytest.raises(InvalidStateError):
        meek_closure(g)


# -- chain components and chordality -----------------------------------------

def test_chain_components_sorted():
    g = Pdag.from_edges(5, undirected=[(3, 4), (1, 2)])
    assert chain_components(g) == [[0], [1, 2], [3, 4]]


def test_is_chordal_examples():
    c4 = Pdag.from_edges(4, undirected=[(0, 1), (1, 2), (2, 3), (0, 3)])
    assert not is_chordal(c4)
    filled = Pdag.from_edges(4, undirected=[(0, 1), (1, 2), (2, 3), (0, 3),
                                            (0, 2)])
    assert is_chordal(filled)
    assert is_chordal(Pdag.from_edges(3, undirected=[(0, 1), (1, 2)]))
    assert is_chordal(Pdag.from_edges(1))


@given(st.integers(0, 10_000))
@settings(max_examples=60, deadline=None)
def test_cpdag_chain_components_chordal(seed):
    rng = np.random.default_rng(seed)
    cp = cpdag_from_dag(random_dag(rng, 7, 0.4))
    for comp in chain_components(cp):
        assert is_chordal(cp.induced(comp))


# -- interventions -----------------------------------------------------------

def test_intervention_triangle(triangle_dag):
    state = cpdag_from_dag(triangle_dag).drop_directed()
    out = apply_intervention(state, triangle_dag, 1)
    assert out.oriented_count == 3
    assert not out.next_state.undirected_edges()
    assert set(out.oriented_edges) == {(0, 1), (0, 2), (1, 2)}


def test_intervention_counts_only_new_orientations(worked_dag_five):
    state = cpdag_from_dag(worked_dag_five).drop_directed()
    out = apply_intervention(state, worked_dag_five, 0)
    assert out.oriented_count == 1
    assert out.oriented_edges == ((0, 1),)


def test_intervention_rejects_bad_node(triangle_dag):
    state = cpdag_from_dag(triangle_dag).drop_directed()
    with pytest.raises(GraphError):
        apply_intervention(state, triangle_dag, 7)


@given(st.integers(0, 10_000))
@settings(max_examples=50, deadline=None)
def test_intervention_soundness_and_progress(seed):
    """Every oriented edge agrees with the truth; full sweep orients all."""
    rng = np.random.default_rng(seed)
    truth = random_dag(rng, 7, 0.45)
    state = cpdag_from_dag(truth).drop_directed()
    nodes = list(rng.permutation(truth.n))
    for v in nodes:
        out = apply_intervention(state, truth, v)
        for a, b in out.oriented_edges:
            assert truth.has_edge(a, b)
        for comp in chain_components(out.next_state):
            assert is_chordal(out.next_state.induced(comp))
        state = out.next_state
    assert not state.undirected_edges()


def test_discovered_edge_ratio():
    assert discovered_edge_ratio(4, 2) == 0.5
    assert discovered_edge_ratio(4, 4) == 1.0
    with pytest.raises(UndefinedRatioError):
        discovered_edge_ratio(0, 0)
    with pytest.raises(ValueError):
        discovered_edge_ratio(3, 4)


def test_norm_pair():
    assert _norm_pair(3, 1) == (1, 3) and _norm_pair(1, 3) == (1, 3)
