"""Gaussian-process regression surrogate with a Matern-5/2 ARD kernel.

Inputs are expected in the unit cube; observed values are standardized
internally per fit. Hyperparameters (per-dimension lengthscales and the
signal variance) are chosen by multi-start maximization of the log
marginal likelihood with analytic gradients.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve, solve_triangular
from scipy.optimize import minimize

from .errors import FitError, NumericalError

SQRT5 = np.sqrt(5.0)

JITTER_FLOOR = 1e-10
JITTER_MAX = 1e-4


@dataclass(frozen=True)
class Dataset:
    """Evaluated points (unit cube) with their objective values."""

    points: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        vals = np.asarray(self.values, dtype=float).ravel()
        if len(pts) != len(vals) or len(vals) < 1:
            raise ValueError("points and values must have equal length >= 1")
        if not np.all(np.isfinite(vals)):
            raise ValueError("values must be finite")
        if pts.min() < -1e-12 or pts.max() > 1 + 1e-12:
            raise ValueError("points must lie in the unit cube")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class GpConfig:
    noise_variance: float = JITTER_FLOOR
    fit_restarts: int = 5
    lengthscale_bounds: tuple[float, float] = (1e-3, 10.0)
    variance_bounds: tuple[float, float] = (1e-3, 1e3)

    def __post_init__(self):
        if self.noise_variance < JITTER_FLOOR:
            raise ValueError(f"noise_variance must be >= jitter floor {JITTER_FLOOR}")
        if self.fit_restarts < 1:
            raise ValueError("fit_restarts must be positive")
        for lo, hi in (self.lengthscale_bounds, self.variance_bounds):
            if not (0 < lo < hi):
                raise ValueError("bounds must be nonempty with positive lower ends")


def kernel_matern52(r, signal_variance):
    """Matern-5/2 kernel as a function of the ARD-scaled distance r >= 0."""
    r = np.asarray(r, dtype=float)
    s5r = SQRT5 * r
    val = signal_variance * (1.0 + s5r + s5r * s5r / 3.0) * np.exp(-s5r)
    return val if val.ndim else float(val)


def _scaled_dists(xa: np.ndarray, xb: np.ndarray, lengthscales: np.ndarray) -> np.ndarray:
    diff = xa[:, None, :] - xb[None, :, :]
    sq = np.sum((diff / lengthscales) ** 2, axis=-1)
    return np.sqrt(np.maximum(sq, 0.0))


def _chol_with_jitter(kmat: np.ndarray, noise: float):
    """Cholesky of kmat + noise*I, escalating the diagonal jitter x10 on failure."""
    jitter = max(noise, JITTER_FLOOR)
    eye = np.eye(len(kmat))
    while jitter <= JITTER_MAX:
        try:
            c, low = cho_factor(kmat + jitter * eye, lower=True)
            return c, low, jitter
        except np.linalg.LinAlgError:
            jitter *= 10.0
    raise NumericalError(f"Cholesky failed up to maximum jitter {JITTER_MAX}")


def _lml_and_grad(x, y, log_ls, log_sv, noise):
    """Log marginal likelihood of y under the kernel, plus gradient w.r.t.
    (log lengthscales, log signal variance)."""
    n, d = x.shape
    ls = np.exp(log_ls)
    sv = np.exp(log_sv)
    r = _scaled_dists(x, x, ls)
    s5r = SQRT5 * r
    expt = np.exp(-s5r)
    kmat = sv * (1.0 + s5r + s5r * s5r / 3.0) * expt
    c, low, _ = _chol_with_jitter(kmat, noise)
    alpha = cho_solve((c, low), y)
    lml = (
        -0.5 * float(y @ alpha)
        - float(np.sum(np.log(np.diag(c))))
        - 0.5 * n * np.log(2.0 * np.pi)
    )
    # trace term: dLML/dtheta = 0.5 tr((alpha alpha^T - K^-1) dK/dtheta)
    kinv = cho_solve((c, low), np.eye(n))
    w = np.outer(alpha, alpha) - kinv
    grad = np.empty(d + 1)
    # dK/dr = -(5/3) sv r (1 + sqrt5 r) exp(-sqrt5 r); with
    # dr/dlog ls_j = -delta_j^2 / (ls_j^2 r) this stays finite at r = 0.
    pref = (5.0 / 3.0) * sv * (1.0 + s5r) * expt
    for j in range(d):
        dsq = (x[:, None, j] - x[None, :, j]) ** 2 / ls[j] ** 2
        grad[j] = 0.5 * float(np.sum(w * (pref * dsq)))
    grad[d] = 0.5 * float(np.sum(w * kmat))
    return lml, grad


def log_marginal_likelihood(data: Dataset, lengthscales, signal_variance, noise_variance=0.0):
    """LML of the raw observed values under the given hyperparameters."""
    ls = np.broadcast_to(np.asarray(lengthscales, dtype=float), (data.dim,)).copy()
    lml, _ = _lml_and_grad(
        data.points, data.values, np.log(ls), np.log(signal_variance), noise_variance
    )
    return lml


def log_marginal_likelihood_gradient(data: Dataset, lengthscales, signal_variance,
                                     noise_variance=0.0):
    """Gradient of the LML w.r.t. (log lengthscales..., log signal variance)."""
    ls = np.broadcast_to(np.asarray(lengthscales, dtype=float), (data.dim,)).copy()
    _, grad = _lml_and_grad(
        data.points, data.values, np.log(ls), np.log(signal_variance), noise_variance
    )
    return grad


@dataclass(frozen=True)
class PosteriorModel:
    """Immutable fitted GP; shareable across threads."""

    x_train: np.ndarray
    lengthscales: np.ndarray
    signal_variance: float
    noise_variance: float
    chol: np.ndarray = field(repr=False)
    alpha: np.ndarray = field(repr=False)
    y_mean: float
    y_scale: float

    def predict(self, x) -> tuple[np.ndarray, np.ndarray]:
        """Posterior mean and standard deviation at one point or a batch."""
        xq = np.atleast_2d(np.asarray(x, dtype=float))
        r = _scaled_dists(xq, self.x_train, self.lengthscales)
        kstar = kernel_matern52(r, self.signal_variance)
        mean_std = kstar @ self.alpha
        v = solve_triangular(self.chol, kstar.T, lower=True)
        var = self.signal_variance - np.sum(v * v, axis=0)
        std_std = np.sqrt(np.maximum(var, 0.0))
        mean = self.y_mean + self.y_scale * mean_std
        std = self.y_scale * std_std
        if np.asarray(x).ndim == 1:
            return float(mean[0]), float(std[0])
        return mean, std


def predict(model: PosteriorModel, x):
    return model.predict(x)


def fit(data: Dataset, config: GpConfig, seed: int) -> PosteriorModel:
    """Fit hyperparameters by multi-start LML maximization; deterministic per seed."""
    y_mean = float(np.mean(data.values))
    y_scale = float(np.std(data.values))
    if y_scale < 1e-12:
        y_scale = 1.0
    y = (data.values - y_mean) / y_scale
    x = data.points
    d = data.dim

    lb = np.log(np.array([config.lengthscale_bounds[0]] * d + [config.variance_bounds[0]]))
    ub = np.log(np.array([config.lengthscale_bounds[1]] * d + [config.variance_bounds[1]]))
    rng = np.random.default_rng(seed)
    starts = [np.zeros(d + 1)]
    for _ in range(config.fit_restarts - 1):
        starts.append(rng.uniform(lb, ub))

    def neg_lml(theta):
        try:
            lml, grad = _lml_and_grad(x, y, theta[:d], theta[d], config.noise_variance)
        except NumericalError:
            return 1e25, np.zeros(d + 1)
        return -lml, -grad

    best_theta, best_val = None, np.inf
    for theta0 in starts:
        res = minimize(
            neg_lml,
            np.clip(theta0, lb, ub),
            jac=True,
            method="L-BFGS-B",
            bounds=list(zip(lb, ub)),
        )
        if res.fun < best_val:
            best_val, best_theta = res.fun, res.x
    if best_theta is None or not np.isfinite(best_val):
        raise FitError("no hyperparameter start produced a finite likelihood")

    ls = np.exp(best_theta[:d])
    sv = float(np.exp(best_theta[d]))
    kmat = kernel_matern52(_scaled_dists(x, x, ls), sv)
    try:
        c, low, used = _chol_with_jitter(kmat, config.noise_variance)
    except NumericalError as exc:
        raise FitError(str(exc)) from exc
    chol = np.tril(c) if low else np.triu(c).T
    alpha = cho_solve((c, low), y)
    return PosteriorModel(
        x_train=x,
        lengthscales=ls,
        signal_variance=sv,
        noise_variance=used,
        chol=chol,
        alpha=alpha,
        y_mean=y_mean,
        y_scale=y_scale,
    )
