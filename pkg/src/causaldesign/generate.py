"""Synthetic connected chordal DAG generation with density control.

A random vertex order is drawn; each vertex connects to lower-order
vertices with probability min(1, c/rank), edges are directed from lower
to higher order, and a descending clique-fill sweep makes every vertex's
lower-order neighborhood a clique. The drawn order is therefore a
perfect elimination ordering of the resulting skeleton, so the skeleton
is chordal, the DAG is acyclic, and every parent set is a clique.

The proportionality constant c is calibrated by bisection so the mean
realized density matches the target; individual draws are resampled
until they land within tolerance (best effort past the resample cap).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import GenSpecError
from .graphs import Dag

log = logging.getLogger(__name__)

_CALIBRATION_CACHE: dict[tuple[int, float, int], float] = {}


def min_density(n: int) -> float:
    """Density forced by connectivity: (n-1) edges out of C(n, 2)."""
    return (n - 1) / math.comb(n, 2)


@dataclass(frozen=True)
class GenSpec:
    n: int
    rho: float
    tolerance: float = 0.10       # relative, on realized density
    max_resamples: int = 50
    seed: int | None = None

    def __post_init__(self):
        if self.n < 2:
            raise GenSpecError(f"need at least 2 nodes, got {self.n}")
        if not 0.0 < self.rho <= 1.0:
            raise GenSpecError(f"density {self.rho} outside (0, 1]")
        if self.tolerance <= 0:
            raise GenSpecError("tolerance must be positive")
        if self.rho < min_density(self.n):
            raise GenSpecError(
                f"density {self.rho} below the connectivity minimum "
                f"{min_density(self.n):.4f} for n={self.n}")


def _generate_once(n: int, c: float, rng: np.random.Generator) -> Dag:
    order = rng.permutation(n)            # order[i] = vertex with rank i+1
    rank_of = np.empty(n, dtype=int)
    for i, v in enumerate(order):
        rank_of[v] = i + 1
    nbrs_low: list[set[int]] = [set() for _ in range(n)]  # lower-rank nbrs

    def connect(lo: int, hi: int) -> None:
        nbrs_low[hi].add(lo)

    for i in range(1, n):
        v = order[i]
        prob = min(1.0, c / (i + 1))
        picks = np.nonzero(rng.random(i) < prob)[0]
        for j in picks:
            connect(int(order[j]), v)
        if not nbrs_low[v]:
            connect(int(order[int(rng.integers(i))]), v)

    # descending clique-fill sweep: parents of each vertex become a clique
    for i in range(n - 1, 0, -1):
        v = order[i]
        lows = sorted(nbrs_low[v], key=lambda u: rank_of[u])
        for a in range(len(lows)):
            for b in range(a + 1, len(lows)):
                connect(lows[a], lows[b])

    parents = [sorted(nbrs_low[v]) for v in range(n)]
    return Dag(n, parents, validate=False)


def calibrate_c(n: int, rho: float, rng: np.random.Generator | None = None,
                trials: int = 40, iters: int = 24) -> float:
    """Bisection on c so the Monte-Carlo mean density matches rho."""
    if rho < min_density(n):
        raise GenSpecError(
            f"density {rho} below the connectivity minimum for n={n}")
    key = (n, round(rho, 9), trials)
    if key in _CALIBRATION_CACHE:
        return _CALIBRATION_CACHE[key]
    if rng is None:
        # deterministic stream per (n, rho): calibration is a pure function
        rng = np.random.default_rng(abs(hash(key)) % (2 ** 32))
    denom = math.comb(n, 2)

    def mean_density(c: float) -> float:
        return float(np.mean([_generate_once(n, c, rng).edge_count() / denom
                              for _ in range(trials)]))

    lo, hi = 0.0, 1.0
    while mean_density(hi) < rho and hi < 4 * n:
        hi *= 2.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mean_density(mid) < rho:
            lo = mid
        else:
            hi = mid
    c = 0.5 * (lo + hi)
    _CALIBRATION_CACHE[key] = c
    return c


def random_chordal_dag(spec: GenSpec, rng: np.random.Generator) -> Dag:
    """Connected chordal DAG whose density approximates spec.rho."""
    c = calibrate_c(spec.n, spec.rho)
    denom = math.comb(spec.n, 2)
    best: Dag | None = None
    best_err = math.inf
    for _ in range(max(1, spec.max_resamples)):
        dag = _generate_once(spec.n, c, rng)
        err = abs(dag.edge_count() / denom - spec.rho) / spec.rho
        if err < best_err:
            best, best_err = dag, err
        if err <= spec.tolerance:
            return dag
    log.warning("density %.3f missed target %.3f (rel err %.2f) after %d "
                "resamples; returning closest draw",
                best.edge_count() / denom, spec.rho, best_err,
                spec.max_resamples)
    return best
