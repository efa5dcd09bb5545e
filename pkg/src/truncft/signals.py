"""Signals supported on [-1, 1], sampled on a left-point grid."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

HALF_PI = np.pi / 2


@dataclass(frozen=True)
class GridSignal:
    """Real samples ``values[m] = f(a + m * spacing)``, ``m = 0..N-1``.

    The right endpoint ``b`` is never a node (left-point convention).
    """

    values: np.ndarray
    a: float = -1.0
    b: float = 1.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 2:
            raise ValueError("GridSignal needs a 1-D array with at least 2 samples")
        if not np.all(np.isfinite(v)):
            raise ValueError("GridSignal values must be finite")
        if not self.b > self.a:
            raise ValueError("need b > a")
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def spacing(self) -> float:
        return (self.b - self.a) / self.n

    @property
    def nodes(self) -> np.ndarray:
        return self.a + self.spacing * np.arange(self.n)

    def scaled(self, c: float) -> "GridSignal":
        return GridSignal(c * self.values, self.a, self.b)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "value"])
            for x, v in zip(self.nodes, self.values):
                w.writerow([f"{x:.17g}", f"{v:.17g}"])

    @classmethod
    def from_csv(cls, path) -> "GridSignal":
        data = np.loadtxt(Path(path), delimiter=",", skiprows=1, ndmin=2)
        x, v = data[:, 0], data[:, 1]
        n = len(x)
        b = x[0] + (x[-1] - x[0]) * n / (n - 1)
        # nodes were written with 17 digits; snap the endpoint back
        return cls(v, a=float(x[0]), b=float(np.round(b, 12)))


@dataclass(frozen=True)
class EigenfunctionSpec:
    """Mode ``k`` of the Dirichlet Laplacian on (-1, 1): sin(k*pi*(x+1)/2)."""

    k: int

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"mode index must be a positive integer, got {self.k!r}")
        object.__setattr__(self, "k", int(self.k))

    @property
    def omega(self) -> float:
        """Exact frequency number k*pi/2."""
        return self.k * HALF_PI

    def __call__(self, x):
        return np.sin(self.k * np.pi * (np.asarray(x) + 1) / 2)


@dataclass(frozen=True)
class FrequencyNumber:
    omega: float

    def __post_init__(self):
        if not (np.isfinite(self.omega) and self.omega > 0):
            raise ValueError("frequency number must be positive and finite")

    @property
    def lambda_min_ratio(self) -> float:
        """omega**2 relative to the first Dirichlet eigenvalue pi**2/4 (always >= 1 in the continuum)."""
        return self.omega**2 / HALF_PI**2

    def __float__(self):
        return float(self.omega)


def eval_eigenfunction(spec: EigenfunctionSpec, n_samples: int) -> GridSignal:
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    x = -1.0 + 2.0 * np.arange(n_samples) / n_samples
    return GridSignal(spec(x))


def l2_norm(signal: GridSignal) -> float:
    """Left-point quadrature of the L2 norm."""
    return float(np.sqrt(signal.spacing * np.sum(signal.values**2)))


def _right_end_extrapolation(v: np.ndarray) -> float:
    # quadratic through the last three nodes, evaluated one step past the last
    if v.size < 3:
        return float(v[-1])
    return float(3 * v[-1] - 3 * v[-2] + v[-3])


def frequency_number(signal: GridSignal, rtol: float = 1e-8) -> FrequencyNumber:
    """Discrete ||f'|| / ||f|| for a signal vanishing at both endpoints.

    The left endpoint is a grid node and must satisfy |f(a)| <= rtol * max|f|.
    The right endpoint is off-grid: the quadratic extrapolation to ``b`` must be
    within rtol * max|f| plus half the last grid increment. The endpoint value
    f(b) = 0 is then appended, and the derivative is taken with second-order
    central differences (one-sided at the ends).
    """
    v = signal.values
    peak = np.max(np.abs(v))
    if peak == 0.0:
        raise ValueError("zero signal has no frequency number")
    tol = rtol * peak
    if abs(v[0]) > tol:
        raise ValueError(f"signal does not vanish at the left endpoint: |f(a)| = {abs(v[0]):.3e}")
    right = _right_end_extrapolation(v)
    if abs(right) > tol + 0.5 * abs(v[-1] - v[-2]):
        raise ValueError(f"signal does not vanish at the right endpoint: f(b) ~ {right:.3e}")

    h = signal.spacing
    ext = np.append(v, 0.0)
    dv = np.gradient(ext, h, edge_order=2)
    num = np.sqrt(h * np.sum(dv[:-1] ** 2))
    return FrequencyNumber(float(num / l2_norm(signal)))
