"""Singular values of the truncated Fourier transform F_B : L2(-1,1) -> L2(-B,B).

Landau's plateau/decay facts are stated in terms of a time-bandwidth count.
With the unitary exp(-i x xi) kernel on [-1, 1] and angular band [-W, W] the
count is 2W/pi, so a nominal count ``B`` corresponds to the angular band
``landau_band(B) = pi * B / 2``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .transform import INV_SQRT_2PI

NUMERICAL_FLOOR = 1e-10


@dataclass(frozen=True)
class OperatorMatrix:
    entries: np.ndarray
    B: float
    x: np.ndarray
    xi: np.ndarray
    x_weights: np.ndarray
    xi_weights: np.ndarray

    @property
    def shape(self):
        return self.entries.shape

    def apply(self, f_values) -> np.ndarray:
        """F_B applied to samples of f; returns samples of f_hat at ``xi``."""
        scaled = self.entries @ (np.sqrt(self.x_weights) * np.asarray(f_values))
        return scaled / np.sqrt(self.xi_weights)


def landau_band(count: float) -> float:
    return np.pi * count / 2


def _nodes(a: float, b: float, n: int, quadrature: str):
    if quadrature == "left":
        return a + (b - a) * np.arange(n) / n, np.full(n, (b - a) / n)
    if quadrature == "gauss":
        t, w = np.polynomial.legendre.leggauss(n)
        return a + (b - a) * (t + 1) / 2, w * (b - a) / 2
    raise ValueError(f"unknown quadrature {quadrature!r}")


def build_operator(B: float, n_space: int, n_freq: int, quadrature: str = "left") -> OperatorMatrix:
    """Nystrom matrix sqrt(w_xi) * (2 pi)^-1/2 exp(-i x xi) * sqrt(w_x).

    The symmetric square-root weights make the matrix singular values converge
    to those of F_B. ``quadrature`` is ``"left"`` or ``"gauss"`` (cross-check).
    """
    if n_space < 4 or n_freq < 4:
        raise ValueError("need at least 4 nodes on each side")
    if not B > 0:
        raise ValueError("bandwidth must be positive")
    x, wx = _nodes(-1.0, 1.0, n_space, quadrature)
    xi, wxi = _nodes(-B, B, n_freq, quadrature)
    A = INV_SQRT_2PI * np.exp(-1j * np.outer(xi, x))
    A *= np.sqrt(wxi)[:, None] * np.sqrt(wx)[None, :]
    return OperatorMatrix(A, B, x, xi, wx, wxi)


def singular_values(op) -> np.ndarray:
    """Full singular spectrum, descending (LAPACK divide-and-conquer SVD)."""
    a = op.entries if isinstance(op, OperatorMatrix) else np.asarray(op)
    try:
        return scipy.linalg.svdvals(a)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(f"SVD failed to converge: {exc}") from exc


@dataclass(frozen=True)
class DecayFit:
    plateau_count: int
    decay_rate: float
    fit_indices: np.ndarray


def decay_fit(sigmas, B: float) -> DecayFit:
    """Plateau count (#sigma > 0.9) and slope of log sigma past index floor(B).

    ``B`` is the nominal Landau count; the fit uses sigma_{floor(B)+k}, k >= 1
    (1-based), for every value above the numerical floor.
    """
    s = np.asarray(sigmas, dtype=float)
    nb = int(np.floor(B))
    idx = np.arange(1, s.size + 1)
    tail = (idx > nb) & (s > NUMERICAL_FLOOR)
    if np.count_nonzero(s > NUMERICAL_FLOOR) < nb + 10 or tail.sum() < 2:
        raise ValueError("too few singular values above the numerical floor")
    k = idx[tail] - nb
    slope = np.polyfit(k, np.log(s[tail]), 1)[0]
    if not slope < 0:
        raise ValueError(f"singular values do not decay past the plateau (slope {slope:.3g})")
    return DecayFit(int(np.count_nonzero(s > 0.9)), float(slope), idx[tail])
