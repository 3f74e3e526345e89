"""Closed-form acquisition utilities and the Hedge portfolio meta-selector.

All evaluators follow the minimization convention: improvement is measured
against the lowest observed value f_min, and larger acquisition values are
better. A sigma floor makes every improvement-based utility total: below it
WEI/EI collapse to 0 and PI to a step on the posterior mean.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

from .errors import DomainError

SIGMA_FLOOR = 1e-12

INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)


def standard_normal(z):
    """Gaussian pdf and cdf at z (vectorized)."""
    z = np.asarray(z, dtype=float)
    pdf = INV_SQRT_2PI * np.exp(-0.5 * z * z)
    cdf = ndtr(z)
    if pdf.ndim == 0:
        return float(pdf), float(cdf)
    return pdf, cdf


def _z(mean, std, f_min):
    safe = np.where(std < SIGMA_FLOOR, 1.0, std)
    return (f_min - mean) / safe


def eval_wei(mean, std, f_min, alpha):
    """Weighted EI: alpha * z*s*cdf(z) + (1-alpha) * s*pdf(z)."""
    mean = np.asarray(mean, dtype=float)
    std = np.asarray(std, dtype=float)
    z = _z(mean, std, f_min)
    pdf, cdf = standard_normal(z)
    val = alpha * z * std * cdf + (1.0 - alpha) * std * pdf
    val = np.where(std < SIGMA_FLOOR, 0.0, val)
    return float(val) if val.ndim == 0 else val


def eval_ei(mean, std, f_min):
    """Expected Improvement: s * (z*cdf(z) + pdf(z)); equals 2*WEI(alpha=0.5)."""
    return 2.0 * eval_wei(mean, std, f_min, 0.5)


def eval_pi(mean, std, f_min):
    """Probability of Improvement: cdf(z), with a step at the sigma floor."""
    mean = np.asarray(mean, dtype=float)
    std = np.asarray(std, dtype=float)
    z = _z(mean, std, f_min)
    _, cdf = standard_normal(z)
    val = np.where(std < SIGMA_FLOOR, np.where(mean <= f_min, 1.0, 0.0), cdf)
    return float(val) if val.ndim == 0 else val


@dataclass(frozen=True)
class ConfidenceCoefficient:
    """Inputs of the confidence-bound multiplier: 2*ln(d * t^2 / beta)."""

    d: int
    t: int
    beta: float = 1.0


def beta_t(c: ConfidenceCoefficient) -> float:
    arg = c.d * c.t * c.t / c.beta
    if arg < 1.0:
        raise DomainError(f"d*t^2/beta = {arg} < 1 gives a negative coefficient")
    return 2.0 * np.log(arg)


def eval_bounds(mean, std, coefficient):
    """Upper and lower confidence bounds mean +- coefficient*std."""
    mean = np.asarray(mean, dtype=float)
    std = np.asarray(std, dtype=float)
    ucb = mean + coefficient * std
    lcb = mean - coefficient * std
    if ucb.ndim == 0:
        return float(ucb), float(lcb)
    return ucb, lcb


# --- Portfolio (GP-Hedge) ------------------------------------------------

@dataclass(frozen=True)
class PortfolioArm:
    """One parametrized acquisition: EI/PI with an improvement offset xi,
    or negative LCB with a fixed coefficient."""

    kind: str  # "ei" | "pi" | "ucb"
    param: float

    def evaluate(self, mean, std, f_min):
        if self.kind == "ucb":
            _, lcb = eval_bounds(mean, std, self.param)
            return -lcb
        target = f_min - self.param * abs(f_min)
        if self.kind == "ei":
            return eval_ei(mean, std, target)
        if self.kind == "pi":
            return eval_pi(mean, std, target)
        raise ValueError(f"unknown arm kind {self.kind!r}")


def default_portfolio_arms() -> tuple[PortfolioArm, ...]:
    """Nine arms: EI and PI at xi in {0, 0.01, 0.1}, negative LCB at {0.1, 1, 2}."""
    arms = [PortfolioArm("ei", xi) for xi in (0.0, 0.01, 0.1)]
    arms += [PortfolioArm("pi", xi) for xi in (0.0, 0.01, 0.1)]
    arms += [PortfolioArm("ucb", c) for c in (0.1, 1.0, 2.0)]
    return tuple(arms)


@dataclass
class HedgeState:
    arms: tuple[PortfolioArm, ...] = field(default_factory=default_portfolio_arms)
    eta: float = 1.0
    gains: np.ndarray = None

    def __post_init__(self):
        if len(self.arms) < 2:
            raise ValueError("portfolio needs at least 2 arms")
        if self.eta <= 0:
            raise ValueError("eta must be positive")
        if self.gains is None:
            self.gains = np.zeros(len(self.arms))
        else:
            self.gains = np.asarray(self.gains, dtype=float)


def hedge_probabilities(state: HedgeState) -> np.ndarray:
    g = state.eta * state.gains
    g = g - g.max()
    p = np.exp(g)
    return p / p.sum()


def hedge_select(state: HedgeState, rng: np.random.Generator) -> int:
    """Sample an arm index with probability softmax(eta * gains)."""
    p = hedge_probabilities(state)
    return int(rng.choice(len(p), p=p))


def hedge_update(state: HedgeState, rewards) -> HedgeState:
    rewards = np.asarray(rewards, dtype=float)
    if rewards.shape != state.gains.shape or not np.all(np.isfinite(rewards)):
        raise ValueError("need one finite reward per arm")
    return HedgeState(arms=state.arms, eta=state.eta, gains=state.gains + rewards)


# --- Acquisition specification -------------------------------------------

@dataclass(frozen=True)
class AcquisitionSpec:
    """Which utility the proposal step maximizes at one iteration."""

    kind: str  # "wei" | "ei" | "pi" | "ucb" | "lcb" | arm kinds via PortfolioArm
    alpha: float | None = None
    coefficient: float | None = None
    arm: PortfolioArm | None = None

    def __post_init__(self):
        if self.kind == "wei" and not (0.0 <= self.alpha <= 1.0):
            raise ValueError("WEI weight alpha must lie in [0, 1]")

    def evaluate(self, mean, std, f_min):
        if self.kind == "wei":
            return eval_wei(mean, std, f_min, self.alpha)
        if self.kind == "ei":
            return eval_ei(mean, std, f_min)
        if self.kind == "pi":
            return eval_pi(mean, std, f_min)
        if self.kind == "ucb":
            ucb, _ = eval_bounds(mean, std, self.coefficient)
            return ucb
        if self.kind == "lcb":
            _, lcb = eval_bounds(mean, std, self.coefficient)
            return -lcb
        if self.kind == "arm":
            return self.arm.evaluate(mean, std, f_min)
        raise ValueError(f"unknown acquisition kind {self.kind!r}")
