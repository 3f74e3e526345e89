"""Sequential Bayesian-optimization loop with per-iteration controller step.

Runs are pure functions of (objective, config): the initial design, the
hyperparameter fits, and every search use seeded generators, so repeated
execution reproduces the trace byte for byte.
"""

from __future__ import annotations

import json
import time
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from . import control, gp
from .acquisition import (
    AcquisitionSpec,
    ConfidenceCoefficient,
    HedgeState,
    beta_t,
    hedge_select,
    hedge_update,
)
from .acqopt import SearchBudget, SearchSpace, maximize

LOG_REGRET_FLOOR = 1e-12
ZERO_REGRET_SENTINEL = -10000.0


@dataclass
class ObservationHistory:
    points: list = field(default_factory=list)
    values: list = field(default_factory=list)
    incumbent_index: int = -1
    f_min: float = np.inf

    def add(self, x, y: float) -> bool:
        """Append an observation; returns True when the incumbent improved."""
        self.points.append(np.asarray(x, dtype=float))
        self.values.append(float(y))
        if y < self.f_min:
            self.f_min = float(y)
            self.incumbent_index = len(self.values) - 1
            return True
        return False

    def as_dataset(self) -> gp.Dataset:
        return gp.Dataset(np.array(self.points), np.array(self.values))

    def points_array(self) -> np.ndarray:
        return np.array(self.points)


def update_incumbent(history: ObservationHistory):
    """First-occurrence argmin point and its value."""
    idx = int(np.argmin(history.values))
    return history.points[idx], float(history.values[idx])


@dataclass(frozen=True)
class RunConfig:
    init_size: int = 24
    init_kind: str = "sobol"
    bo_budget: int = 256
    schedule: control.SchedulePolicy = control.SchedulePolicy("sawei")
    seed: int = 0
    alpha0: float = 0.5
    epsilon: float = 0.1
    delta_alpha: float = 0.1
    horizon: int = 1
    window: int = 7
    attitude_mode: str = "last"
    attitude_exploit_term: str = "pi"
    adjust_enabled: bool = True
    hedge_eta: float = 1.0
    gp_config: gp.GpConfig = field(default_factory=gp.GpConfig)
    search_budget: SearchBudget = field(default_factory=SearchBudget)

    def __post_init__(self):
        if self.init_size < 2:
            raise ValueError("initial design size must be >= 2")
        if self.bo_budget < 1:
            raise ValueError("bo_budget must be >= 1")


@dataclass
class TraceRow:
    iteration: int
    phase: str  # "init" | "bo"
    x: np.ndarray
    y: float
    incumbent: float
    regret: float
    log10_regret: float
    ubr_raw: float | None
    ubr_smoothed: float | None
    alpha: float | None
    a_explore: float | None
    a_exploit: float | None
    adjusted: bool
    wall_time: float


@dataclass
class RunTrace:
    rows: list[TraceRow]
    f_opt: float
    adjust_events: int

    CSV_COLUMNS = (
        "iteration", "phase", "y", "incumbent", "regret", "log10_regret",
        "ubr_raw", "ubr_smoothed", "alpha", "a_explore", "a_exploit", "adjusted",
    )

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(",".join(self.CSV_COLUMNS) + "\n")
            for r in self.rows:
                cells = [
                    str(r.iteration), r.phase, _fmt(r.y), _fmt(r.incumbent),
                    _fmt(r.regret), _fmt(r.log10_regret), _fmt(r.ubr_raw),
                    _fmt(r.ubr_smoothed), _fmt(r.alpha), _fmt(r.a_explore),
                    _fmt(r.a_exploit), "1" if r.adjusted else "0",
                ]
                fh.write(",".join(cells) + "\n")

    def summary(self) -> dict:
        last = self.rows[-1]
        return {
            "final_regret": last.regret,
            "final_log10_regret": last.log10_regret,
            "adjust_events": self.adjust_events,
            "alpha_trajectory": [r.alpha for r in self.rows if r.phase == "bo"],
        }

    def summary_to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.summary(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def _fmt(v) -> str:
    return "" if v is None else repr(float(v))


def initial_design(space: SearchSpace, kind: str, size: int, seed: int) -> np.ndarray:
    """Seeded space-filling design: scrambled Sobol', Latin hypercube, or
    uniform sampling. Discrete spaces get distinct table rows instead."""
    if space.is_discrete:
        rng = np.random.default_rng(seed)
        take = min(size, len(space.table))
        idx = rng.permutation(len(space.table))[:take]
        return space.table[idx].copy()
    if kind == "sobol":
        with warnings.catch_warnings():
            # scipy warns when n is not a power of two; fine for a DoE batch
            warnings.simplefilter("ignore", UserWarning)
            return qmc.Sobol(space.dimension, scramble=True, seed=seed).random(size)
    if kind == "lhs":
        return qmc.LatinHypercube(space.dimension, seed=seed).random(size)
    if kind == "uniform":
        return np.random.default_rng(seed).uniform(size=(size, space.dimension))
    raise ValueError(f"unknown initial design kind {kind!r}")


def _log_regret(regret: float) -> float:
    if regret == 0.0:
        return ZERO_REGRET_SENTINEL
    return float(np.log10(max(regret, LOG_REGRET_FLOOR)))


def _proposal_space(space: SearchSpace, history: ObservationHistory) -> SearchSpace:
    """On discrete spaces, drop already-evaluated rows so a tabular run with
    enough budget enumerates the table; falls back to the full table."""
    if not space.is_discrete:
        return space
    seen = {tuple(p) for p in history.points}
    remaining = np.array([row for row in space.table if tuple(row) not in seen])
    if len(remaining) == 0:
        return space
    return SearchSpace(space.dimension, remaining)


def run_bo(objective, config: RunConfig) -> RunTrace:
    """Execute initial design plus `bo_budget` surrogate-guided evaluations."""
    space: SearchSpace = objective.space
    d = space.dimension
    rng = np.random.default_rng(np.random.SeedSequence((config.seed, 777)))
    fit_seeds = np.random.SeedSequence((config.seed, 1234)).generate_state(
        config.bo_budget + 1
    )

    state = control.ControllerState(
        alpha=config.alpha0,
        epsilon=config.epsilon,
        delta_alpha=config.delta_alpha,
        horizon=config.horizon,
        window=config.window,
        attitude_mode=config.attitude_mode,
        attitude_exploit_term=config.attitude_exploit_term,
    )
    policy = config.schedule
    hedge = HedgeState(eta=config.hedge_eta) if policy.variant == "portfolio" else None

    history = ObservationHistory()
    rows: list[TraceRow] = []
    adjust_events = 0
    t0 = time.perf_counter()

    design = initial_design(space, config.init_kind, config.init_size, config.seed)
    for i, x in enumerate(design):
        y = objective.evaluate(x)
        history.add(x, y)
        regret = history.f_min - objective.f_opt
        rows.append(TraceRow(
            iteration=i, phase="init", x=np.asarray(x, dtype=float), y=y,
            incumbent=history.f_min, regret=regret, log10_regret=_log_regret(regret),
            ubr_raw=None, ubr_smoothed=None, alpha=None, a_explore=None,
            a_exploit=None, adjusted=False, wall_time=time.perf_counter() - t0,
        ))

    model = gp.fit(history.as_dataset(), config.gp_config, int(fit_seeds[0]))

    for t in range(config.bo_budget):
        # Resolve this iteration's acquisition.
        arm_nominees = None
        if policy.variant == "sawei":
            spec = AcquisitionSpec("wei", alpha=state.alpha)
        elif policy.variant == "portfolio":
            prop_space = _proposal_space(space, history)
            arm_nominees = []
            for arm in hedge.arms:
                def af(xs, _arm=arm):
                    mean, std = model.predict(xs)
                    return _arm.evaluate(mean, std, history.f_min)
                nominee, _ = maximize(af, prop_space, config.search_budget,
                                      history.points_array(), rng)
                arm_nominees.append(nominee)
            arm_idx = hedge_select(hedge, rng)
            spec = AcquisitionSpec("arm", arm=hedge.arms[arm_idx])
        else:
            spec = control.schedule_alpha(policy, t, config.bo_budget)

        if arm_nominees is not None:
            x_next = arm_nominees[arm_idx]
        else:
            def af(xs, _spec=spec):
                mean, std = model.predict(xs)
                return _spec.evaluate(mean, std, history.f_min)
            x_next, _ = maximize(af, _proposal_space(space, history),
                                 config.search_budget, history.points_array(), rng)

        # Attitude at the proposal, from the posterior that produced it.
        m_next, s_next = model.predict(x_next)
        a_explore, a_exploit = control.attitude_terms(
            m_next, s_next, history.f_min, state.attitude_exploit_term
        )

        y = objective.evaluate(x_next)
        improved = history.add(x_next, y)
        control.record_attitude(state, a_explore, a_exploit, improved)

        model = gp.fit(history.as_dataset(), config.gp_config, int(fit_seeds[t + 1]))

        coeff = beta_t(ConfidenceCoefficient(d=d, t=t + 1))
        ubr = control.compute_ubr(model, history.points_array(), space, coeff,
                                  config.search_budget, rng)
        state.ubr_raw.append(ubr)
        state.ubr_smoothed.append(smoothed := control.smooth_iqm(state.ubr_raw, state.window))

        alpha_used = spec.alpha if spec.kind == "wei" else None
        adjusted = False
        if control.gradient_converged(state):
            if policy.variant == "sawei" and config.adjust_enabled:
                control.adjust_alpha(state)
                adjusted = True
                adjust_events += 1

        if hedge is not None:
            means, _ = model.predict(np.array(arm_nominees))
            hedge = hedge_update(hedge, -np.asarray(means))

        regret = history.f_min - objective.f_opt
        rows.append(TraceRow(
            iteration=config.init_size + t, phase="bo", x=x_next, y=y,
            incumbent=history.f_min, regret=regret, log10_regret=_log_regret(regret),
            ubr_raw=ubr, ubr_smoothed=smoothed, alpha=alpha_used,
            a_explore=a_explore, a_exploit=a_exploit, adjusted=adjusted,
            wall_time=time.perf_counter() - t0,
        ))

    return RunTrace(rows=rows, f_opt=objective.f_opt, adjust_events=adjust_events)
