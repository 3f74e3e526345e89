"""Acquisition maximization by combined random and local search.

Continuous spaces are searched with uniform random candidates plus short
greedy local-search trajectories started from the best candidates; discrete
spaces (tabular benchmarks) are enumerated exactly. History points can be
injected as seed candidates, which gives the inclusion guarantees the
regret-bound computation relies on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gp import PosteriorModel


@dataclass(frozen=True)
class SearchSpace:
    """Unit-cube box (continuous) or a finite candidate table (discrete)."""

    dimension: int
    table: np.ndarray | None = None  # (m, dimension) rows in the unit cube

    def __post_init__(self):
        if self.table is not None:
            tbl = np.atleast_2d(np.asarray(self.table, dtype=float))
            if tbl.size == 0:
                raise ValueError("discrete table must be nonempty")
            if tbl.shape[1] != self.dimension:
                raise ValueError("table rows must match the dimension")
            if tbl.min() < -1e-12 or tbl.max() > 1 + 1e-12:
                raise ValueError("table rows must lie in the unit cube")
            object.__setattr__(self, "table", tbl)

    @property
    def is_discrete(self) -> bool:
        return self.table is not None


@dataclass(frozen=True)
class SearchBudget:
    n_random: int = 2000
    n_local_starts: int = 5
    local_steps: int = 10
    step_scale: float = 0.1

    def __post_init__(self):
        if min(self.n_random, self.n_local_starts, self.local_steps) < 1 or self.step_scale <= 0:
            raise ValueError("all budget fields must be positive")


def maximize(af, space: SearchSpace, budget: SearchBudget, seed_points, rng):
    """Best point under af among random samples, seeds, and local trajectories.

    af maps an (m, d) batch to m values. Deterministic given the rng state;
    ties break toward the earliest candidate.
    """
    if space.is_discrete:
        vals = np.asarray(af(space.table), dtype=float)
        idx = int(np.argmax(vals))
        return space.table[idx].copy(), float(vals[idx])

    cands = [rng.uniform(0.0, 1.0, size=(budget.n_random, space.dimension))]
    if len(seed_points):
        cands.append(np.atleast_2d(np.asarray(seed_points, dtype=float)))
    cands = np.vstack(cands)
    vals = np.asarray(af(cands), dtype=float)

    order = np.argsort(-vals, kind="stable")[: budget.n_local_starts]
    best_idx = int(np.argmax(vals))
    best_x, best_v = cands[best_idx].copy(), float(vals[best_idx])

    for i in order:
        x, v = cands[i].copy(), float(vals[i])
        step = budget.step_scale
        for _ in range(budget.local_steps):
            cand = np.clip(x + step * rng.standard_normal(space.dimension), 0.0, 1.0)
            cv = float(np.asarray(af(cand[None, :]), dtype=float)[0])
            if cv > v:
                x, v = cand, cv
            else:
                step *= 0.5
        if v > best_v:
            best_x, best_v = x, v
    return best_x, best_v


def minimize_lcb(model: PosteriorModel, space: SearchSpace, coefficient: float,
                 history_points, budget: SearchBudget, rng) -> float:
    """Minimum lower confidence bound over the space; never exceeds the
    minimum over the injected history points."""

    def neg_lcb(x):
        mean, std = model.predict(x)
        return -(mean - coefficient * std)

    _, value = maximize(neg_lcb, space, budget, history_points, rng)
    return -value
