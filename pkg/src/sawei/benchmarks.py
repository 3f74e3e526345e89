"""Benchmark objectives: shifted/rotated synthetic functions and tabular files.

Synthetic objectives live on [-5, 5]^d exposed through the unit cube. Each
instance seeds a uniform shift of the optimum in [-4, 4]^d and a random
orthogonal rotation applied to the centered coordinates, so the landscape
structure is preserved while the embedding changes. All optima are at 0.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .acqopt import SearchSpace
from .errors import EmptyTable, ParseError, UnknownFunction

LOWER, UPPER = -5.0, 5.0

SYNTHETIC_IDS = ("sphere", "rosenbrock", "rastrigin", "schwefel", "katsuura", "gallagher101")

# argmax of w*sin(sqrt(|w|)) on [-500, 500]
_SCHWEFEL_WOPT = 420.968746359982025


def _random_rotation(rng: np.random.Generator, d: int) -> np.ndarray:
    if d == 1:
        return np.eye(1)
    a = rng.standard_normal((d, d))
    q, r = np.linalg.qr(a)
    return q * np.sign(np.diag(r))


def _rosenbrock(z):
    w = z + 1.0
    return float(np.sum(100.0 * (w[1:] - w[:-1] ** 2) ** 2 + (w[:-1] - 1.0) ** 2))


def _rastrigin(z):
    return float(10.0 * len(z) + np.sum(z * z - 10.0 * np.cos(2.0 * np.pi * z)))


def _schwefel_g(w, d):
    """Per-coordinate Schwefel term with out-of-range penalty; bounded above
    by its value at the optimum, so the assembled function stays >= 0."""
    aw = np.abs(w)
    inside = w * np.sin(np.sqrt(aw))
    hi = (500.0 - np.mod(w, 500.0)) * np.sin(np.sqrt(np.abs(500.0 - np.mod(w, 500.0)))) \
        - (w - 500.0) ** 2 / (10000.0 * d)
    lo = (np.mod(aw, 500.0) - 500.0) * np.sin(np.sqrt(np.abs(np.mod(aw, 500.0) - 500.0))) \
        - (w + 500.0) ** 2 / (10000.0 * d)
    return np.where(w > 500.0, hi, np.where(w < -500.0, lo, inside))


def _schwefel(z):
    d = len(z)
    w = 100.0 * z + _SCHWEFEL_WOPT
    g_opt = _SCHWEFEL_WOPT * np.sin(np.sqrt(_SCHWEFEL_WOPT))
    return float(np.sum(g_opt - _schwefel_g(w, d)))


def _katsuura(z):
    d = len(z)
    j = np.arange(1, 33)
    two_j = 2.0 ** j
    prod = 1.0
    for i in range(d):
        s = np.sum(np.abs(two_j * z[i] - np.round(two_j * z[i])) / two_j)
        prod *= (1.0 + (i + 1) * s) ** (10.0 / d ** 1.2)
    return float(10.0 / d ** 2 * prod - 10.0 / d ** 2)


class _Gallagher:
    """Max of 101 Gaussian peaks; the strongest peak sits at the origin of the
    centered coordinates, so the minimum of (10 - max)^2 is 0 there."""

    def __init__(self, rng: np.random.Generator, d: int):
        self.centers = np.vstack([
            np.zeros(d),
            rng.uniform(-4.9, 4.9, size=(100, d)),
        ])
        self.weights = np.concatenate([[10.0], rng.uniform(1.1, 9.1, size=100)])
        conds = np.concatenate([[np.sqrt(1000.0)], 10.0 ** rng.uniform(0.0, 3.0, size=100)])
        scales = []
        for i, c in enumerate(conds):
            expo = np.linspace(0.0, 1.0, d) if d > 1 else np.array([0.5])
            diag = c ** expo / c ** 0.25
            scales.append(rng.permutation(diag))
        self.inv_scales = np.array(scales)
        self.d = d

    def __call__(self, z):
        diff = z[None, :] - self.centers
        quad = np.sum(diff * diff * self.inv_scales, axis=1) / (2.0 * self.d)
        g = np.max(self.weights * np.exp(-quad))
        return float((10.0 - g) ** 2)


@dataclass
class SyntheticObjective:
    function_id: str
    dimension: int
    instance: int
    f_opt: float = 0.0

    def __post_init__(self):
        if self.function_id not in SYNTHETIC_IDS:
            raise UnknownFunction(f"no synthetic function {self.function_id!r}")
        if self.dimension < 1 or self.instance < 1:
            raise ValueError("dimension and instance must be >= 1")
        rng = np.random.default_rng(
            np.random.SeedSequence((hash_id(self.function_id), self.dimension, self.instance))
        )
        self.x_opt = rng.uniform(-4.0, 4.0, size=self.dimension)
        self.rotation = _random_rotation(rng, self.dimension)
        if self.function_id == "gallagher101":
            self._gallagher = _Gallagher(rng, self.dimension)
        self.space = SearchSpace(self.dimension)
        self.is_tabular = False

    @property
    def label(self) -> str:
        return f"{self.function_id}_{self.dimension}d_i{self.instance}"

    def evaluate_original(self, x) -> float:
        """Evaluate at a point in original [-5, 5]^d coordinates."""
        z = self.rotation @ (np.asarray(x, dtype=float) - self.x_opt)
        fid = self.function_id
        if fid == "sphere":
            return float(np.sum(z * z))
        if fid == "rosenbrock":
            return _rosenbrock(z)
        if fid == "rastrigin":
            return _rastrigin(z)
        if fid == "schwefel":
            return _schwefel(z)
        if fid == "katsuura":
            return _katsuura(z)
        return self._gallagher(z)

    def evaluate(self, u) -> float:
        """Evaluate at a unit-cube point."""
        x = LOWER + (UPPER - LOWER) * np.asarray(u, dtype=float)
        return self.evaluate_original(x)


def hash_id(function_id: str) -> int:
    return int.from_bytes(function_id.encode(), "little") % (2 ** 31)


def make_synthetic(function_id: str, dimension: int, instance: int) -> SyntheticObjective:
    return SyntheticObjective(function_id, dimension, instance)


@dataclass
class TabularObjective:
    """Exact-lookup objective over a finite configuration table."""

    space: SearchSpace
    values: np.ndarray
    f_opt: float
    label: str
    parameter_names: tuple[str, ...]
    is_tabular: bool = True

    def evaluate(self, u) -> float:
        key = tuple(np.asarray(u, dtype=float))
        try:
            return self._lookup[key]
        except AttributeError:
            self._lookup = {tuple(row): float(v)
                            for row, v in zip(self.space.table, self.values)}
            return self._lookup[key]


def _rows_from_json(path: Path):
    with open(path) as fh:
        payload = json.load(fh)
    if not isinstance(payload, list):
        raise ParseError(f"{path}: expected a top-level list of row objects")
    if not payload:
        raise EmptyTable(str(path))
    names = [k for k in payload[0] if k != "objective"]
    rows = []
    for i, rec in enumerate(payload):
        if "objective" not in rec:
            raise ParseError(f"{path}: row {i} lacks an 'objective' field")
        try:
            rows.append(([float(rec[n]) for n in names], float(rec["objective"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"{path}: row {i}: {exc}") from exc
    return names, rows


def _rows_from_csv(path: Path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyTable(str(path)) from None
        if not header or header[-1].strip() != "objective":
            raise ParseError(f"{path}: last header column must be 'objective'")
        names = [h.strip() for h in header[:-1]]
        rows = []
        for i, rec in enumerate(reader, start=2):
            if len(rec) != len(header):
                raise ParseError(f"{path}: line {i}: expected {len(header)} columns")
            try:
                rows.append(([float(v) for v in rec[:-1]], float(rec[-1])))
            except ValueError as exc:
                raise ParseError(f"{path}: line {i}: {exc}") from exc
    if not rows:
        raise EmptyTable(str(path))
    return names, rows


def load_tabular(path) -> TabularObjective:
    """Load a candidate table (CSV or JSON) as a discrete-space objective.

    Parameter columns are min-max normalized to the unit cube; duplicate
    configurations are a schema violation.
    """
    path = Path(path)
    if not path.exists():
        raise ParseError(f"{path}: no such file")
    names, rows = _rows_from_json(path) if path.suffix == ".json" else _rows_from_csv(path)

    configs = np.array([r[0] for r in rows], dtype=float)
    values = np.array([r[1] for r in rows], dtype=float)
    seen = set()
    for i, cfg in enumerate(configs):
        key = tuple(cfg)
        if key in seen:
            raise ParseError(f"{path}: duplicate configuration at row {i}")
        seen.add(key)

    lo = configs.min(axis=0)
    span = configs.max(axis=0) - lo
    span[span == 0.0] = 1.0
    table = (configs - lo) / span
    space = SearchSpace(configs.shape[1], table)
    return TabularObjective(
        space=space,
        values=values,
        f_opt=float(values.min()),
        label=path.stem,
        parameter_names=tuple(names),
    )
