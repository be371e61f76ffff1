"""Shared fixtures and graph builders for the test suite."""
from __future__ import annotations

import numpy as np
import pytest

from causaldesign import Dag, GraphError, cpdag_from_dag


def random_dag(rng: np.random.Generator, n: int, p: float = 0.4) -> Dag:
    """Random labeled DAG: permuted order + independent upper edges."""
    order = rng.permutation(n)
    rank = np.empty(n, dtype=int)
    for i, v in enumerate(order):
        rank[v] = i
    parents: list[list[int]] = [[] for _ in range(n)]
    for v in range(n):
        for u in range(n):
            if rank[u] < rank[v] and rng.random() < p:
                parents[v].append(u)
    return Dag(n, parents)


def all_dags(n: int) -> list[Dag]:
    """Every labeled DAG on n nodes (feasible for n <= 4)."""
    out = []
    for mask in range(3 ** (n * (n - 1) // 2)):
        # ternary digit per unordered pair: absent / u->v / v->u
        parents: list[list[int]] = [[] for _ in range(n)]
        m = mask
        for u in range(n):
            for v in range(u + 1, n):
                d = m % 3
                m //= 3
                if d == 1:
                    parents[v].append(u)
                elif d == 2:
                    parents[u].append(v)
        try:
            out.append(Dag(n, parents))
        except GraphError:
            continue
    return out


@pytest.fixture
def worked_dag_five() -> Dag:
    """Five-node example: 0->1, 1->2, 3->2, 1->3, 4->3."""
    return Dag(5, [[], [0], [1, 3], [1, 4], []])


@pytest.fixture
def triangle_dag() -> Dag:
    """Triangle 0->1, 0->2, 1->2: a fully reversible 3-clique."""
    return Dag(3, [[], [0], [0, 1]])


@pytest.fixture
def chain_state(worked_dag_five):
    """Chain part of the five-node example's essential graph."""
    return cpdag_from_dag(worked_dag_five).drop_directed()
