"""Online controller for the WEI exploration weight, plus baseline schedules.

The controller tracks an upper-bound-regret signal (min history UCB minus
min space LCB), smooths it with a moving interquartile mean, and whenever
the smoothed gradient settles near zero nudges the weight opposite to the
dominant search attitude of the latest proposal.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .acquisition import SIGMA_FLOOR, AcquisitionSpec, standard_normal
from .acqopt import SearchBudget, SearchSpace, minimize_lcb
from .gp import PosteriorModel

PULSE_CYCLE = (0.1, 0.3, 0.5, 0.7, 0.9)

ATTITUDE_MODES = ("last", "inc_change", "last_adjust")
EXPLOIT_TERMS = ("pi", "wei_term")


@dataclass
class ControllerState:
    alpha: float = 0.5
    epsilon: float = 0.1
    delta_alpha: float = 0.1
    horizon: int = 1
    window: int = 7
    attitude_mode: str = "last"
    attitude_exploit_term: str = "pi"
    ubr_raw: list[float] = field(default_factory=list)
    ubr_smoothed: list[float] = field(default_factory=list)
    max_abs_gradient: float = 0.0
    explore_acc: float = 0.0
    exploit_acc: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.alpha <= 1.0):
            raise ValueError("alpha must lie in [0, 1]")
        if not (0.0 < self.epsilon <= 1.0):
            raise ValueError("epsilon must lie in (0, 1]")
        if not (0.0 < self.delta_alpha < 1.0):
            raise ValueError("delta_alpha must lie in (0, 1)")
        if self.attitude_mode not in ATTITUDE_MODES:
            raise ValueError(f"attitude_mode must be one of {ATTITUDE_MODES}")
        if self.attitude_exploit_term not in EXPLOIT_TERMS:
            raise ValueError(f"attitude_exploit_term must be one of {EXPLOIT_TERMS}")


def smooth_iqm(series, window: int = 7) -> float:
    """Interquartile mean of the trailing window: sort, drop floor(k/4) per
    side, average the rest."""
    tail = np.sort(np.asarray(series, dtype=float)[-window:])
    k = len(tail)
    drop = k // 4
    return float(np.mean(tail[drop: k - drop]))


def compute_ubr(model: PosteriorModel, history_points, space: SearchSpace,
                coefficient: float, budget: SearchBudget, rng) -> float:
    """Min-over-history UCB minus min-over-space LCB; nonnegative because the
    history points are injected into the LCB search."""
    pts = np.atleast_2d(np.asarray(history_points, dtype=float))
    mean, std = model.predict(pts)
    ucb_min = float(np.min(mean + coefficient * std))
    lcb_min = minimize_lcb(model, space, coefficient, pts, budget, rng)
    return ucb_min - lcb_min


def gradient_converged(state: ControllerState) -> bool:
    """True when the latest n-step difference of the smoothed signal is within
    epsilon times the running maximum absolute difference."""
    n = state.horizon
    if len(state.ubr_smoothed) < n + 1:
        return False
    g = abs(state.ubr_smoothed[-1] - state.ubr_smoothed[-1 - n])
    state.max_abs_gradient = max(state.max_abs_gradient, g)
    return g <= state.epsilon * state.max_abs_gradient


def attitude_terms(mean, std, f_min, mode: str = "pi"):
    """Exploration and exploitation summands of WEI at a proposed point."""
    if std < SIGMA_FLOOR:
        if mode == "pi":
            return 0.0, 1.0 if mean <= f_min else 0.0
        return 0.0, 0.0
    z = (f_min - mean) / std
    pdf, cdf = standard_normal(z)
    a_explore = std * pdf
    a_exploit = cdf if mode == "pi" else z * std * cdf
    return float(a_explore), float(a_exploit)


def record_attitude(state: ControllerState, a_explore: float, a_exploit: float,
                    incumbent_changed: bool) -> None:
    if state.attitude_mode == "last":
        state.explore_acc = a_explore
        state.exploit_acc = a_exploit
        return
    if state.attitude_mode == "inc_change" and incumbent_changed:
        state.explore_acc = 0.0
        state.exploit_acc = 0.0
    state.explore_acc += a_explore
    state.exploit_acc += a_exploit


def adjust_alpha(state: ControllerState) -> float:
    """Move alpha opposite to the dominant attitude; exact ties count as
    exploitation-dominant. Resets accumulators in last_adjust mode."""
    if state.explore_acc > state.exploit_acc:
        state.alpha = min(1.0, state.alpha + state.delta_alpha)
    else:
        state.alpha = max(0.0, state.alpha - state.delta_alpha)
    if state.attitude_mode == "last_adjust":
        state.explore_acc = 0.0
        state.exploit_acc = 0.0
    return state.alpha


# --- Baseline schedules ---------------------------------------------------

@dataclass(frozen=True)
class SchedulePolicy:
    variant: str  # "sawei" | "static" | "steps" | "switch_ei_pi" | "pulse" | "portfolio"
    alpha: float | None = None
    alpha_from: float | None = None
    alpha_to: float | None = None
    n_steps: int = 5
    fraction: float | None = None

    def __post_init__(self):
        if self.variant == "static" and not (0.0 <= self.alpha <= 1.0):
            raise ValueError("static schedule needs alpha in [0, 1]")
        if self.variant == "switch_ei_pi" and not (0.0 < self.fraction < 1.0):
            raise ValueError("switch fraction must lie in (0, 1)")
        if self.n_steps < 1:
            raise ValueError("step count must be >= 1")

    def label(self) -> str:
        if self.variant == "static":
            return f"wei{self.alpha:g}"
        if self.variant == "steps":
            return f"steps{self.alpha_from:g}-{self.alpha_to:g}"
        if self.variant == "switch_ei_pi":
            return f"ei-pi{self.fraction:g}"
        return self.variant


def schedule_alpha(policy: SchedulePolicy, t: int, total: int) -> AcquisitionSpec:
    """Acquisition for BO iteration t (0-based) of a run with `total` BO steps.

    The sawei variant is resolved by the run loop from live controller state
    and is rejected here.
    """
    if not (0 <= t < total):
        raise ValueError("iteration out of range")
    if policy.variant == "static":
        return AcquisitionSpec("wei", alpha=policy.alpha)
    if policy.variant == "steps":
        levels = np.linspace(policy.alpha_from, policy.alpha_to, policy.n_steps)
        seg = min(policy.n_steps - 1, t * policy.n_steps // total)
        return AcquisitionSpec("wei", alpha=float(levels[seg]))
    if policy.variant == "switch_ei_pi":
        switch_at = int(np.floor(policy.fraction * total))
        return AcquisitionSpec("ei" if t < switch_at else "pi")
    if policy.variant == "pulse":
        return AcquisitionSpec("wei", alpha=PULSE_CYCLE[t % len(PULSE_CYCLE)])
    if policy.variant == "portfolio":
        return AcquisitionSpec("portfolio")
    raise ValueError(f"schedule {policy.variant!r} is not resolved statically")
