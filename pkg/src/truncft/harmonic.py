"""Harmonic measure of the slit [0, B] x {0} in the half-strip {Re z > 0, |Im z| < L}.

The finite-difference solver truncates the strip at ``Re z = truncation_length``
with zero Dirichlet data there. :func:`exact_harmonic_measure` is an independent
conformal-map evaluation used to check it.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class HarmonicMeasureField:
    """Nodal values ``values[j, i]`` at ``x = i * mesh``, ``y = -L + j * mesh``."""

    L: float
    B: float
    truncation_length: float
    mesh: float
    values: np.ndarray
    residual: float = 0.0

    @property
    def x(self) -> np.ndarray:
        return self.mesh * np.arange(self.values.shape[1])

    @property
    def y(self) -> np.ndarray:
        return -self.L + self.mesh * np.arange(self.values.shape[0])

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return (z.real >= 0) & (z.real <= self.truncation_length) & (np.abs(z.imag) <= self.L)

    def __call__(self, z) -> np.ndarray:
        """Bilinear interpolation of the nodal field at complex points."""
        z = np.asarray(z, dtype=complex)
        if not np.all(self.contains(z)):
            raise ValueError("evaluation point outside the solved field")
        h = self.mesh
        fx = z.real / h
        fy = (z.imag + self.L) / h
        nx, ny = self.values.shape[1] - 1, self.values.shape[0] - 1
        i = np.clip(np.floor(fx).astype(int), 0, nx - 1)
        j = np.clip(np.floor(fy).astype(int), 0, ny - 1)
        tx, ty = fx - i, fy - j
        v = self.values
        return (
            (1 - tx) * (1 - ty) * v[j, i]
            + tx * (1 - ty) * v[j, i + 1]
            + (1 - tx) * ty * v[j + 1, i]
            + tx * ty * v[j + 1, i + 1]
        )

    def to_csv(self, path) -> None:
        xx, yy = np.meshgrid(self.x, self.y)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "y", "w"])
            for x, y, v in zip(xx.ravel(), yy.ravel(), self.values.ravel()):
                w.writerow([f"{x:.17g}", f"{y:.17g}", f"{v:.17g}"])


def _steps(length: float, mesh: float, name: str) -> int:
    n = length / mesh
    k = int(round(n))
    if k < 1 or abs(n - k) > 1e-9 * max(1.0, n):
        raise ValueError(f"mesh {mesh} does not divide {name} = {length}")
    return k


def solve_harmonic_measure(
    L: float,
    B: float,
    truncation_length: float | None = None,
    mesh: float = 1 / 64,
    method: str = "direct",
    tol: float = 1e-10,
    maxiter: int = 20000,
) -> HarmonicMeasureField:
    """Five-point Laplace solve with data 1 on the slit and 0 elsewhere.

    Slit nodes are Dirichlet nodes, so the rows just above and below the slit
    each see the value 1 rather than each other. ``method`` is ``"direct"``
    (sparse LU) or ``"cg"`` (conjugate gradients, capped at ``maxiter``).
    The max-norm residual of the unscaled stencil must be <= ``tol``.
    """
    if not (L > 0 and B >= 0 and mesh > 0):
        raise ValueError("need L > 0, B >= 0, mesh > 0")
    if truncation_length is None:
        truncation_length = float(np.ceil(max(4 * B, 4 * L, 8.0)))
    if truncation_length < max(4 * B, 4 * L, 8.0) - 1e-12:
        raise ValueError("truncation_length must be >= max(4B, 4L, 8)")
    nx = _steps(truncation_length, mesh, "truncation_length")
    nL = _steps(L, mesh, "L")
    nB = _steps(B, mesh, "B") if B > 0 else 0
    ny = 2 * nL

    u = np.zeros((ny + 1, nx + 1))
    fixed = np.zeros_like(u, dtype=bool)
    fixed[0, :] = fixed[-1, :] = True
    fixed[:, 0] = fixed[:, -1] = True
    fixed[nL, : nB + 1] = True
    u[nL, : nB + 1] = 1.0

    free = ~fixed
    idx = -np.ones(u.shape, dtype=np.int64)
    idx[free] = np.arange(free.sum())
    n = int(free.sum())

    rows, cols, data = [], [], []
    rhs = np.zeros(n)
    jj, ii = np.nonzero(free)
    me = idx[jj, ii]
    rows.append(me)
    cols.append(me)
    data.append(np.full(n, 4.0))
    for dj, di in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        nj, ni = jj + dj, ii + di
        nb_free = free[nj, ni]
        rows.append(me[nb_free])
        cols.append(idx[nj, ni][nb_free])
        data.append(-np.ones(nb_free.sum()))
        np.add.at(rhs, me[~nb_free], u[nj, ni][~nb_free])
    A = sp.csr_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    )

    if method == "direct":
        sol = spla.spsolve(A.tocsc(), rhs)
    elif method == "cg":
        sol, info = spla.cg(A, rhs, rtol=tol / max(1.0, np.abs(rhs).max()) / 10, atol=0.0, maxiter=maxiter)
        if info != 0:
            raise ConvergenceError(f"CG did not converge within {maxiter} iterations")
    else:
        raise ValueError(f"unknown method {method!r}")
    residual = float(np.max(np.abs(A @ sol - rhs)))
    if residual > tol:
        raise ConvergenceError(f"residual {residual:.3e} exceeds tolerance {tol:.1e}")
    u[free] = sol
    return HarmonicMeasureField(L, B, float(truncation_length), mesh, u, residual)


def exact_harmonic_measure(z, L: float, B: float) -> np.ndarray:
    """Closed form on the untruncated half-strip.

    ``zeta = sinh(pi z / 2L)`` opens the half-strip onto the right half-plane
    (slit -> [0, a], a = sinh(pi B / 2L)); ``s = sqrt(zeta^2 - a^2)`` sends the
    slit to the segment i[-a, a] of the imaginary axis, whose harmonic measure
    in the right half-plane is the normalized viewing angle.
    """
    z = np.asarray(z, dtype=complex)
    p = np.pi / (2 * L)
    a = np.sinh(p * B)
    zeta = np.sinh(p * z)
    s = np.sqrt(zeta**2 - a**2)
    sig, tau = s.real, s.imag
    with np.errstate(divide="ignore", invalid="ignore"):
        w = (np.arctan2(a - tau, sig) + np.arctan2(a + tau, sig)) / np.pi
    return np.clip(w, 0.0, 1.0)


def exact_measure_on_axis(B0: float, L: float, B: float) -> float:
    """w_L(B0, B) for real B0 >= B, evaluated in log form to avoid sinh overflow."""
    if B0 < B:
        raise ValueError("need B0 >= B")
    p = np.pi / (2 * L)
    # sinh(pB)/sinh(pB0) = exp(p(B - B0)) * (1 - e^{-2pB}) / (1 - e^{-2pB0})
    log_ratio = p * (B - B0) + np.log(-np.expm1(-2 * p * B)) - np.log(-np.expm1(-2 * p * B0))
    return float(2 / np.pi * np.arcsin(min(1.0, np.exp(log_ratio))))


def conforming_mesh(target: float, *lengths: float, max_refine: int = 4) -> float:
    """Largest mesh 1/n <= target such that every length is a multiple of it."""
    n0 = int(np.ceil(1 / target - 1e-12))
    for n in range(n0, max_refine * n0 + 1):
        if all(abs(x * n - round(x * n)) < 1e-9 * max(1.0, x * n) for x in lengths):
            return 1.0 / n
    raise ValueError(f"no mesh within {max_refine}x refinement of {target} conforms to {lengths}")
