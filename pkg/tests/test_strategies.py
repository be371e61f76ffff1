"""Selection policies: worked examples, dominance, tie-breaks, agreement."""
from __future__ import annotations

import numpy as np
import pytest

from causaldesign import (CapacityError, Dag, NoActionError, Pdag,
                          apply_intervention, cpdag_from_dag,
                          enumerate_extensions, init_params, mec_size,
                          outcome_partition, plan_optimal, select_average,
                          select_entropy, select_learned, select_minimax,
                          select_random)
from causaldesign.strategies import (StrategyKind, action_set,
                                     sample_extension_fast)

from conftest import random_dag


def chain_state_of(seed: int, n: int = 6) -> Pdag:
    rng = np.random.default_rng(seed)
    return cpdag_from_dag(random_dag(rng, n, 0.45)).drop_directed()


def path3() -> Pdag:
    return Pdag.from_edges(3, undirected=[(0, 1), (1, 2)])


# -- plumbing ----------------------------------------------------------------

def test_strategy_kind_validation():
    with pytest.raises(ValueError):
        StrategyKind("nope")
    with pytest.raises(ValueError):
        StrategyKind("learned")
    with pytest.raises(ValueError):
        StrategyKind("entropy", cap=0)


def test_action_set_excludes_saturated_nodes():
    g = Pdag.from_edges(4, undirected=[(0, 1)], directed=[(2, 3)])
    assert action_set(g) == [0, 1]


def test_selectors_raise_without_actions():
    g = Pdag.from_edges(2, directed=[(0, 1)])
    rng = np.random.default_rng(0)
    with pytest.raises(NoActionError):
        select_random(g, rng)
    with pytest.raises(NoActionError):
        select_entropy(g)
    with pytest.raises(NoActionError):
        select_minimax(g)
    with pytest.raises(NoActionError):
        select_average(g)
    with pytest.raises(NoActionError):
        select_learned(g, init_params(4, 1, 2, rng))


def test_all_selectors_return_actions():
    rng = np.random.default_rng(1)
    params = init_params(8, 1, 2, rng)
    for seed in range(15):
        state = chain_state_of(seed)
        acts = action_set(state)
        if not acts:
            continue
        assert select_random(state, np.random.default_rng(seed)) in acts
        assert select_entropy(state) in acts
        assert select_minimax(state) in acts
        assert select_average(state) in acts
        assert select_average(state, samples=50, rng=rng) in acts
        assert select_learned(state, params) in acts


def test_deterministic_given_seed():
    state = chain_state_of(3)
    a = select_random(state, np.random.default_rng(42))
    b = select_random(state, np.random.default_rng(42))
    assert a == b
    assert select_entropy(state) == select_entropy(state)
    assert select_minimax(state) == select_minimax(state)


def test_ties_break_to_lowest_id():
    # hub reveals everything; leaves 1 and 2 are symmetric
    star = Pdag.from_edges(3, undirected=[(0, 1), (0, 2)])
    assert select_entropy(star) == 0
    sym = Pdag.from_edges(2, undirected=[(0, 1)])
    assert select_entropy(sym) == 0
    assert select_minimax(sym) == 0
    assert select_average(sym) == 0


# -- worked examples ---------------------------------------------------------

def test_heuristics_on_worked_example(worked_dag_five):
    state = cpdag_from_dag(worked_dag_five).drop_directed()
    # single undirected edge 0-1: everyone picks node 0
    for pick in (select_entropy(state), select_minimax(state),
                 select_average(state)):
        assert pick == 0


def test_average_prefers_middle_of_path():
    state = path3()
    assert select_average(state) == 1
    assert select_minimax(state) == 1


def test_plan_optimal_trivia(worked_dag_five):
    state = cpdag_from_dag(worked_dag_five).drop_directed()
    exts = enumerate_extensions(state)
    plan0 = plan_optimal(state, exts, 0)
    assert plan0.value == 0.0 and plan0.action is None
    plan1 = plan_optimal(state, exts, 1)
    assert plan1.value == pytest.approx(1.0)
    assert plan1.action == 0


def test_plan_optimal_single_edge():
    g = Pdag.from_edges(2, undirected=[(0, 1)])
    plan = plan_optimal(g, enumerate_extensions(g), 1)
    assert plan.value == pytest.approx(1.0)
    assert plan.action == 0


def test_plan_optimal_full_budget_orients_everything():
    rng = np.random.default_rng(4)
    for _ in range(10):
        state = cpdag_from_dag(random_dag(rng, 5, 0.5)).drop_directed()
        und = state.undirected_edges()
        if not und:
            continue
        plan = plan_optimal(state, enumerate_extensions(state), state.n)
        assert plan.value == pytest.approx(len(und))


# -- dominance properties ----------------------------------------------------

def _expected_gain(state: Pdag, exts, a: int) -> float:
    gains = [apply_intervention(state, d, a).oriented_count
             for d in exts.extensions]
    return float(np.mean(gains))


def test_optimal_dominates_heuristics_budget_one():
    rng = np.random.default_rng(5)
    params = init_params(8, 1, 2, rng)
    for seed in range(25):
        state = chain_state_of(seed)
        if not action_set(state):
            continue
        exts = enumerate_extensions(state)
        best = plan_optimal(state, exts, 1).value
        for pick in (select_entropy(state), select_minimax(state),
                     select_average(state), select_learned(state, params),
                     select_random(state, np.random.default_rng(seed))):
            assert _expected_gain(state, exts, pick) <= best + 1e-9


def _worst_case_remaining(state: Pdag, a: int) -> int:
    part = outcome_partition(state, a)
    return max(len(cell) for cell in part.cells.values())


def test_minimax_beats_random_worst_case():
    for seed in range(25):
        state = chain_state_of(seed)
        if not action_set(state):
            continue
        a_mm = select_minimax(state)
        a_rd = select_random(state, np.random.default_rng(seed))
        assert _worst_case_remaining(state, a_mm) <= \
            _worst_case_remaining(state, a_rd)


def test_exact_and_mc_average_agree():
    """Monte-Carlo argmax matches exact argmax on >= 95% of instances."""
    rng = np.random.default_rng(6)
    agree = total = 0
    for seed in range(100):
        state = chain_state_of(seed, n=6)
        if not action_set(state):
            continue
        total += 1
        exact = select_average(state)
        mc = select_average(state, samples=2000, rng=rng)
        agree += exact == mc
    assert total >= 80
    assert agree / total >= 0.95


# -- capacity and sampling ---------------------------------------------------

def test_capacity_errors_propagate():
    state = Pdag.from_edges(4, undirected=[(0, 1), (1, 2), (2, 3)])
    assert mec_size(state) > 2
    with pytest.raises(CapacityError):
        select_entropy(state, cap=1)
    with pytest.raises(CapacityError):
        select_average(state, cap=1)


def test_fast_extension_sampler_valid():
    rng = np.random.default_rng(8)
    for seed in range(20):
        state = chain_state_of(seed, n=8)
        exts = set(enumerate_extensions(state).extensions)
        for _ in range(10):
            d = sample_extension_fast(state, rng)
            assert d in exts
