"""Truncated Fourier transform on [-1, 1] and its FRFT-based inversion.

Conventions used throughout the package:

* forward  f_hat(xi) = (2 pi)^(-1/2) * int f(x) exp(-i x xi) dx
* inverse  f(x)      = (2 pi)^(-1/2) * int f_hat(xi) exp(+i x xi) dxi

``SpectralSamples.prefactor`` records a constant the samples carry relative to
``f_hat``; the inversion divides it out, so measurements generated from the
closed form for the eigenfunctions (prefactor 1/sqrt(2 pi)) invert correctly.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .signals import EigenfunctionSpec, GridSignal

SQRT_2PI = np.sqrt(2 * np.pi)
INV_SQRT_2PI = 1.0 / SQRT_2PI


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform grid -B, -B+h, ..., B-h with ``2B/h`` a positive integer."""

    B: float
    h: float
    sample_count: int = field(init=False)

    def __post_init__(self):
        if not (self.B > 0 and self.h > 0):
            raise ValueError("bandwidth and spacing must be positive")
        ratio = 2 * self.B / self.h
        m = int(round(ratio))
        if m < 1 or abs(ratio - m) > 1e-9 * max(1.0, ratio):
            raise ValueError(
                f"2B/h = {ratio:.6g} is not a positive integer; "
                f"nearest valid spacings: {', '.join(f'{s:.6g}' for s in nearest_valid_spacings(self.B, self.h))}"
            )
        object.__setattr__(self, "sample_count", m)

    @classmethod
    def from_count(cls, B: float, sample_count: int) -> "FrequencyGrid":
        return cls(B, 2 * B / sample_count)

    @classmethod
    def from_rate(cls, B: float, rate: float) -> "FrequencyGrid":
        """Grid with ``M = ceil(rate * B)`` samples."""
        return cls.from_count(B, max(1, int(np.ceil(rate * B - 1e-12))))

    @property
    def nodes(self) -> np.ndarray:
        return -self.B + self.h * np.arange(self.sample_count)


def nearest_valid_spacings(B: float, h: float) -> list[float]:
    ratio = 2 * B / h
    counts = sorted({max(1, int(np.floor(ratio))), max(1, int(np.ceil(ratio)))})
    return [2 * B / m for m in counts]


@dataclass(frozen=True)
class SpectralSamples:
    grid: FrequencyGrid
    values: np.ndarray
    prefactor: float = 1.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape[-1] != self.grid.sample_count:
            raise ValueError(
                f"expected {self.grid.sample_count} samples along the last axis, got {v.shape[-1]}"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("spectral samples must be finite")
        object.__setattr__(self, "values", v)

    def __add__(self, other: "SpectralSamples") -> "SpectralSamples":
        if other.grid != self.grid or other.prefactor != self.prefactor:
            raise ValueError("cannot add samples on different grids/normalizations")
        return SpectralSamples(self.grid, self.values + other.values, self.prefactor)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["xi", "re", "im"])
            for xi, v in zip(self.grid.nodes, self.values):
                w.writerow([f"{xi:.17g}", f"{v.real:.17g}", f"{v.imag:.17g}"])


def closed_form_transform(spec: EigenfunctionSpec, xi):
    """Closed-form transform of f_k with the exp(+i x xi) kernel and 1/(2 pi) factor.

    Equals ``(2 pi)^-1 * int f_k(x) exp(+i x xi) dx``, i.e.
    ``f_hat_k(-xi) / sqrt(2 pi)`` in this package's convention. Accepts real or
    complex ``xi``. Near the removable singularities xi = +-k pi/2 the ratio is
    rewritten exactly as ``i k (-1)^k e^{i xi0} sinc(d) / (2 (xi + xi0))`` with
    ``d = xi - xi0``, which has no cancellation.
    """
    k = spec.k
    xi = np.asarray(xi)
    sign = (-1.0) ** k
    out = np.empty(xi.shape, dtype=complex)

    xi0 = np.where(np.real(xi) >= 0, 1.0, -1.0) * k * np.pi / 2
    d = xi - xi0
    near = np.abs(d) < 0.5

    xf = xi[~near]
    out[~near] = (-np.exp(1j * xf) * sign * np.pi * k + np.pi * k * np.exp(-1j * xf)) / (
        np.pi * (k**2 * np.pi**2 - 4 * xf**2)
    )
    xn, x0n, dn = xi[near], xi0[near], d[near]
    out[near] = 1j * k * sign * np.exp(1j * x0n) * np.sinc(dn / np.pi) / (2 * (xn + x0n))
    return out if out.ndim else out[()]


def eigenfunction_spectrum(spec: EigenfunctionSpec, xi):
    """``f_hat_k(xi)`` in the unitary ``exp(-i x xi)`` convention."""
    return SQRT_2PI * closed_form_transform(spec, -np.asarray(xi))


def forward_truncated(signal: GridSignal, grid: FrequencyGrid) -> SpectralSamples:
    """Left-point quadrature of f_hat on the grid nodes."""
    x = signal.nodes
    xi = grid.nodes
    kernel = np.exp(-1j * np.outer(xi, x))
    vals = INV_SQRT_2PI * signal.spacing * (kernel @ signal.values)
    return SpectralSamples(grid, vals)


def _next_pow2(n: int) -> int:
    return 1 << (n - 1).bit_length()


def frft(x, alpha: float, n_out: int | None = None) -> np.ndarray:
    """Fractional FFT ``G_k = sum_j x_j exp(-2 pi i j k alpha)``, k = 0..n_out-1.

    Bluestein factorization ``jk = (j^2 + k^2 - (k-j)^2)/2`` turns the sum into
    a linear convolution with a chirp, evaluated with power-of-two FFTs of
    length >= m + n_out - 1. Works on the last axis, so batches are allowed.
    """
    x = np.asarray(x, dtype=complex)
    m = x.shape[-1]
    n_out = m if n_out is None else int(n_out)
    if m < 1 or n_out < 1:
        raise ValueError("empty transform")
    size = _next_pow2(m + n_out - 1)

    theta = -np.pi * alpha  # exp(-2 pi i alpha * q) = exp(2 i theta q), q = j^2/2 etc.
    j_in = np.arange(m)
    j_out = np.arange(n_out)
    pre = np.exp(1j * theta * j_in.astype(float) ** 2)
    post = np.exp(1j * theta * j_out.astype(float) ** 2)

    lags = np.arange(-(m - 1), n_out)
    chirp = np.exp(-1j * theta * lags.astype(float) ** 2)
    kernel = np.zeros(size, dtype=complex)
    kernel[:n_out] = chirp[m - 1 :]
    if m > 1:
        kernel[size - (m - 1) :] = chirp[: m - 1]

    buf = np.zeros(x.shape[:-1] + (size,), dtype=complex)
    buf[..., :m] = x * pre
    conv = np.fft.ifft(np.fft.fft(buf, axis=-1) * np.fft.fft(kernel), axis=-1)
    return conv[..., :n_out] * post


def output_nodes(n_out: int, a: float = -1.0, b: float = 1.0) -> np.ndarray:
    return a + (b - a) * np.arange(n_out) / n_out


def _inverse_weight(meas: SpectralSamples) -> float:
    return meas.grid.h * INV_SQRT_2PI / meas.prefactor


def frft_inverse(meas: SpectralSamples, n_out: int | None = None) -> GridSignal:
    """Left-point quadrature of the inverse transform at ``x_n = -1 + 2n/n_out``.

    ``sum_m g_m exp(i x_n xi_m)`` with ``xi_m = -B + m h`` factors as
    ``exp(i x_n (-B)) * sum_m (g_m e^{-i m h}) exp(i n m h dx)``, a fractional
    FFT with ``alpha = -h dx / (2 pi)``. Cost O((M + n_out) log(M + n_out)).
    Batched measurements are not supported here; use :func:`frft_inverse_values`.
    """
    if meas.values.ndim != 1:
        raise ValueError("frft_inverse expects a single measurement; use frft_inverse_values for batches")
    vals = frft_inverse_values(meas, n_out)
    return GridSignal(vals.real)


def frft_inverse_values(meas: SpectralSamples, n_out: int | None = None) -> np.ndarray:
    """Complex reconstruction values; works on batches along leading axes."""
    grid = meas.grid
    m = grid.sample_count
    if m < 2:
        raise ValueError("need at least 2 spectral samples")
    n_out = m if n_out is None else int(n_out)
    dx = 2.0 / n_out
    h, B = grid.h, grid.B
    a = meas.values * np.exp(-1j * h * np.arange(m))
    g = frft(a, -h * dx / (2 * np.pi), n_out)
    x = output_nodes(n_out)
    return _inverse_weight(meas) * np.exp(1j * B) * np.exp(-1j * B * (x + 1)) * g


def direct_inverse_oracle(meas: SpectralSamples, n_out: int | None = None, x=None) -> np.ndarray:
    """O(M * n_out) direct sum of the same quadrature; complex output.

    Evaluates at ``output_nodes(n_out)`` or at arbitrary points ``x``.
    """
    if x is None:
        x = output_nodes(meas.grid.sample_count if n_out is None else int(n_out))
    x = np.asarray(x, dtype=float)
    kernel = np.exp(1j * np.outer(x, meas.grid.nodes))
    return _inverse_weight(meas) * (meas.values @ kernel.T)


def interpolate_linear(signal: GridSignal, x, right_value: float | None = None) -> np.ndarray:
    """Piecewise-affine interpolation of a left-point signal.

    The last cell [x_{N-1}, b] is closed with ``right_value`` (default 0, the
    H^1_0 boundary value).
    """
    nodes = np.append(signal.nodes, signal.b)
    vals = np.append(signal.values, 0.0 if right_value is None else right_value)
    return np.interp(x, nodes, vals)
