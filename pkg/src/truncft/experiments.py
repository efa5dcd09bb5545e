"""Monte-Carlo reconstruction experiments for the eigenfunctions f_k.

Measurements follow the closed-form transform (prefactor 1/sqrt(2 pi) relative
to the unitary f_hat) plus complex Gaussian noise of level ``delta``. With that
normalization the injected noise contributes about ``4 delta sqrt(B / r)`` to
the reconstruction error, i.e. ``delta sqrt(B)`` at the default rate r = 16.
"""
from __future__ import annotations

import configparser
import csv
import json
import re
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .signals import EigenfunctionSpec, GridSignal
from .transform import (
    INV_SQRT_2PI,
    FrequencyGrid,
    SpectralSamples,
    closed_form_transform,
    direct_inverse_oracle,
    eigenfunction_spectrum,
    frft_inverse_values,
    output_nodes,
)

MEASUREMENT_PREFACTOR = INV_SQRT_2PI
DEFAULT_RATE = 16.0
DEFAULT_B_GRID = tuple(np.round(np.arange(0.5, 40.0 + 1e-9, 0.5), 10))


@dataclass(frozen=True)
class NoiseModel:
    delta: float
    seed: int = 0

    def __post_init__(self):
        if not self.delta >= 0:
            raise ValueError("noise level must be non-negative")

    def draw(self, trial: int, m: int) -> np.ndarray:
        """delta * (eps_r + i eps_i) for one trial; Philox keyed by (seed, trial)."""
        gen = np.random.Generator(np.random.Philox(key=[self.seed % 2**64, int(trial)]))
        e = gen.standard_normal((2, m))
        return self.delta * (e[0] + 1j * e[1])

    def draw_batch(self, trials: int, m: int) -> np.ndarray:
        return np.stack([self.draw(t, m) for t in range(trials)])


def noiseless_measurement(spec: EigenfunctionSpec, grid: FrequencyGrid) -> np.ndarray:
    # closed form is written for the exp(+i x xi) kernel; mirror to exp(-i x xi)
    return closed_form_transform(spec, -grid.nodes)


def generate_measurement(spec: EigenfunctionSpec, grid: FrequencyGrid, noise: NoiseModel, trial: int = 0) -> SpectralSamples:
    vals = noiseless_measurement(spec, grid)
    if noise.delta > 0:
        vals = vals + noise.draw(trial, grid.sample_count)
    return SpectralSamples(grid, vals, MEASUREMENT_PREFACTOR)


def reconstruction_error(recon, spec: EigenfunctionSpec) -> np.ndarray | float:
    """[(2/M) sum_m |f_rec_m - f(x_m)|^2]^(1/2) on x_m = -1 + 2(m-1)/M.

    ``recon`` is a GridSignal or a (possibly complex, possibly batched) array
    whose last axis holds the M node values.
    """
    if isinstance(recon, GridSignal):
        if (recon.a, recon.b) != (-1.0, 1.0):
            raise ValueError("reconstruction must live on [-1, 1]")
        vals = recon.values
    else:
        vals = np.asarray(recon)
    m = vals.shape[-1]
    diff = vals - spec(output_nodes(m))
    err = np.sqrt(2.0 / m * np.sum(np.abs(diff) ** 2, axis=-1))
    return float(err) if np.ndim(err) == 0 else err


def _reconstruct_errors(spec: EigenfunctionSpec, grid: FrequencyGrid, noise: NoiseModel, trials: int):
    clean = noiseless_measurement(spec, grid)
    if noise.delta == 0:
        rec = frft_inverse_values(SpectralSamples(grid, clean, MEASUREMENT_PREFACTOR))
        return np.full(trials, reconstruction_error(rec, spec)), None
    eps = noise.draw_batch(trials, grid.sample_count)
    rec = frft_inverse_values(SpectralSamples(grid, clean[None, :] + eps, MEASUREMENT_PREFACTOR))
    return reconstruction_error(rec, spec), eps


@dataclass(frozen=True)
class ExperimentConfig:
    k_list: tuple = (4,)
    B_grid: tuple = DEFAULT_B_GRID
    delta_list: tuple = (0.0,)
    rate: float = DEFAULT_RATE
    trials: int = 1000
    seed: int = 0
    e_cuts: tuple = (0.2, 0.5, 0.7)

    def __post_init__(self):
        for name in ("k_list", "B_grid", "delta_list", "e_cuts"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if not self.k_list or any(int(k) != k or k < 1 for k in self.k_list):
            raise ValueError("k_list must hold positive integers")
        if not self.B_grid or any(b <= 0 for b in self.B_grid):
            raise ValueError("B_grid must hold positive values")
        if list(self.B_grid) != sorted(self.B_grid):
            raise ValueError("B_grid must be sorted ascending")
        if any(d < 0 for d in self.delta_list) or not self.delta_list:
            raise ValueError("delta_list must hold non-negative values")
        if not self.rate > 2 / np.pi:
            raise ValueError("rate must exceed 2/pi (else the reconstruction aliases)")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ValueError("trials must be a positive integer")
        if any(e <= 0 for e in self.e_cuts):
            raise ValueError("e_cut values must be positive")


class ConfigError(ValueError):
    pass


_CONFIG_KEYS = {
    "k": ("k_list", "ints"),
    "bandwidths": ("B_grid", "floats"),
    "deltas": ("delta_list", "floats"),
    "rate": ("rate", "float"),
    "trials": ("trials", "int"),
    "seed": ("seed", "int"),
    "e_cut": ("e_cuts", "floats"),
}


def _parse_list(text: str, kind: str):
    out = []
    for part in re.split(r"[,\s]+", text.strip()):
        if not part:
            continue
        if ":" in part:
            start, stop, step = (float(p) for p in part.split(":"))
            n = int(np.floor((stop - start) / step + 1e-9)) + 1
            out.extend(np.round(start + step * np.arange(n), 10).tolist())
        else:
            out.append(int(part) if kind == "ints" else float(part))
    if kind == "ints":
        if any(float(v) != int(v) for v in out):
            raise ValueError("expected integers")
        out = [int(v) for v in out]
    return tuple(out)


def load_config(path) -> ExperimentConfig:
    """Read an ``[experiment]`` section of ``key = value`` lines.

    Keys: k, bandwidths, deltas, rate, trials, seed, e_cut. List values are
    comma/space separated and accept ``start:stop:step`` ranges (inclusive).
    Errors name the offending line.
    """
    text = Path(path).read_text()
    lines = text.splitlines()

    def line_of(key):
        for i, ln in enumerate(lines, 1):
            if re.match(rf"\s*{re.escape(key)}\s*[=:]", ln):
                return i
        return "?"

    parser = configparser.ConfigParser()
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    if "experiment" not in parser:
        raise ConfigError(f"{path}: missing [experiment] section")
    kwargs = {}
    for key, raw in parser["experiment"].items():
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{line_of(key)}: unknown key {key!r}")
        name, kind = _CONFIG_KEYS[key]
        try:
            if kind == "int":
                val = int(raw)
            elif kind == "float":
                val = float(raw)
            else:
                val = _parse_list(raw, kind)
        except ValueError as exc:
            raise ConfigError(f"{path}:{line_of(key)}: bad value for {key!r}: {raw!r} ({exc})") from exc
        kwargs[name] = val
    try:
        return ExperimentConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


@dataclass(frozen=True)
class Cell:
    k: int
    B: float
    delta: float
    mean_err: float
    stderr: float
    trials: int


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    cells: list = field(default_factory=list)
    critical: dict = field(default_factory=dict)
    fits: dict = field(default_factory=dict)

    def curve(self, k: int, delta: float):
        sel = [c for c in self.cells if c.k == k and c.delta == delta]
        sel.sort(key=lambda c: c.B)
        return np.array([c.B for c in sel]), np.array([c.mean_err for c in sel]), np.array([c.stderr for c in sel])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["k", "B", "delta", "mean_err", "stderr", "trials"])
            for c in self.cells:
                w.writerow([c.k, f"{c.B:.17g}", f"{c.delta:.17g}", f"{c.mean_err:.17g}", f"{c.stderr:.17g}", c.trials])

    def to_dict(self) -> dict:
        return {
            "config": asdict(self.config),
            "cells": [asdict(c) for c in self.cells],
            "critical": {str(k): v for k, v in self.critical.items()},
            "fits": {str(k): v for k, v in self.fits.items()},
        }

    def to_json(self, path) -> None:
        def enc(o):
            if isinstance(o, float) and not np.isfinite(o):
                return "inf" if o > 0 else "-inf"
            return o

        def walk(o):
            if isinstance(o, dict):
                return {k: walk(v) for k, v in o.items()}
            if isinstance(o, (list, tuple)):
                return [walk(v) for v in o]
            return enc(o)

        Path(path).write_text(json.dumps(walk(self.to_dict()), indent=2))


def sweep_error_vs_bandwidth(config: ExperimentConfig) -> ExperimentReport:
    """Mean E_rec over ``trials`` noise draws for every (k, B, delta) cell.

    Noise for trial t is keyed by (seed, t), so cells share noise streams and
    the report is bitwise reproducible. Noise-free cells are computed once.
    """
    report = ExperimentReport(config)
    for k in config.k_list:
        spec = EigenfunctionSpec(k)
        for delta in config.delta_list:
            noise = NoiseModel(delta, config.seed)
            for B in config.B_grid:
                grid = FrequencyGrid.from_rate(B, config.rate)
                errs, _ = _reconstruct_errors(spec, grid, noise, config.trials)
                n = errs.size
                se = float(np.std(errs, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
                report.cells.append(Cell(k, float(B), float(delta), float(np.mean(errs)), se, n))
    return report


def persistent_crossing(B_values, errors, e_cut: float) -> float:
    """Smallest B such that the error stays <= e_cut at every sampled B' >= B.

    Returns inf if the curve ends above the cutoff (e.g. the noise term has
    turned the error back up past it).
    """
    B_values = np.asarray(B_values, dtype=float)
    above = np.asarray(errors) > e_cut
    if above[-1]:
        return float("inf")
    last_above = np.flatnonzero(above)
    i = 0 if last_above.size == 0 else last_above[-1] + 1
    return float(B_values[i])


def critical_bandwidth(report: ExperimentReport, k: int, e_cut: float, delta: float) -> float:
    B, err, _ = report.curve(k, delta)
    if B.size == 0:
        raise ValueError(f"no data for k={k}, delta={delta}")
    return persistent_crossing(B, err, e_cut)


@dataclass(frozen=True)
class CriticalLine:
    C: float
    offset: float
    n_points: int


def fit_critical_line(points) -> CriticalLine:
    """Least-squares B0 = C k + offset over the finite points."""
    pts = np.array([(k, b) for k, b in points if np.isfinite(b)], dtype=float)
    if pts.shape[0] < 3:
        raise ValueError("need at least 3 finite (k, B0) points")
    C, off = np.polyfit(pts[:, 0], pts[:, 1], 1)
    return CriticalLine(float(C), float(off), int(pts.shape[0]))


def critical_analysis(report: ExperimentReport) -> ExperimentReport:
    """Fill ``report.critical`` and ``report.fits`` for every (delta, e_cut)."""
    cfg = report.config
    for delta in cfg.delta_list:
        for e_cut in cfg.e_cuts:
            pts = [(k, critical_bandwidth(report, k, e_cut, delta)) for k in cfg.k_list]
            report.critical[(delta, e_cut)] = pts
            try:
                line = fit_critical_line(pts)
                report.fits[(delta, e_cut)] = asdict(line)
            except ValueError:
                report.fits[(delta, e_cut)] = None
    return report


@dataclass(frozen=True)
class NoiseBoundReport:
    B: float
    delta: float
    noise_free_error: float
    errors: np.ndarray
    hard_bounds: np.ndarray
    sup_noise: np.ndarray

    @property
    def mean_error(self) -> float:
        return float(np.mean(self.errors))

    @property
    def hard_bound_holds(self) -> np.ndarray:
        return self.errors <= self.hard_bounds

    @property
    def excess_coefficient(self) -> float:
        """(mean error - noise-free error) / (delta sqrt(B))."""
        if self.delta == 0:
            return 0.0
        return (self.mean_error - self.noise_free_error) / (self.delta * np.sqrt(self.B))


def noise_error_bound_check(
    spec: EigenfunctionSpec, B: float, delta: float, trials: int, rate: float = DEFAULT_RATE, seed: int = 0
) -> NoiseBoundReport:
    """Per-trial E(g) <= E(noise-free) + sqrt(8) B max_m |eps_m|.

    The discrete inverse has weight h on each sample, so the noise part of the
    reconstruction is bounded pointwise by 2B max|eps| and in the left-point
    L2 norm by sqrt(8) B max|eps|; the triangle inequality does the rest.
    """
    grid = FrequencyGrid.from_rate(B, rate)
    e0, _ = _reconstruct_errors(spec, grid, NoiseModel(0.0), 1)
    e0 = float(e0[0])
    errs, eps = _reconstruct_errors(spec, grid, NoiseModel(delta, seed), trials)
    sup = np.zeros(trials) if eps is None else np.max(np.abs(eps), axis=1)
    bounds = e0 + np.sqrt(8) * grid.B * sup
    # 1e-12 relative: roundoff in the FFT path only
    return NoiseBoundReport(float(B), float(delta), e0, errs, bounds * (1 + 1e-12) + 1e-15, sup)


@dataclass(frozen=True)
class NoiseScaling:
    B: np.ndarray
    noise_free: np.ndarray
    mean: np.ndarray
    c_envelope: float
    c_lsq: float
    hard_bound_fraction: float


def noise_scaling(spec: EigenfunctionSpec, B_values, delta: float, trials: int, rate: float = DEFAULT_RATE, seed: int = 0) -> NoiseScaling:
    """Mean error vs noise-free error + c delta sqrt(B) over a B sweep.

    ``c_envelope`` is the smallest c for which the mean curve lies below the
    overlay at every B; ``c_lsq`` the least-squares c through the origin.
    """
    reps = [noise_error_bound_check(spec, B, delta, trials, rate, seed) for B in B_values]
    B = np.array([r.B for r in reps])
    nf = np.array([r.noise_free_error for r in reps])
    mean = np.array([r.mean_error for r in reps])
    scale = delta * np.sqrt(B)
    excess = mean - nf
    c_env = float(np.max(excess / scale)) if delta > 0 else 0.0
    c_lsq = float(np.dot(excess, scale) / np.dot(scale, scale)) if delta > 0 else 0.0
    frac = float(np.mean(np.concatenate([r.hard_bound_holds for r in reps])))
    return NoiseScaling(B, nf, mean, c_env, c_lsq, frac)


def _fine_grid(n: int = 4096) -> np.ndarray:
    return output_nodes(n)


def _band_limited_inverse(spec: EigenfunctionSpec, B: float, x: np.ndarray) -> np.ndarray:
    """F^{-1} F_B f at x by Gauss-Legendre quadrature over [-B, B]."""
    n = int(max(256, 16 * np.ceil(B)))
    t, w = np.polynomial.legendre.leggauss(n)
    xi = B * t
    vals = eigenfunction_spectrum(spec, xi) * w * B
    return INV_SQRT_2PI * (np.exp(1j * np.outer(x, xi)) @ vals)


def _fine_norm(v: np.ndarray) -> float:
    return float(np.sqrt(2.0 / v.shape[-1] * np.sum(np.abs(v) ** 2, axis=-1)))


def error_decomposition(
    spec: EigenfunctionSpec, B: float, h: float, delta: float, trials: int, seed: int = 0, n_fine: int = 4096
) -> dict:
    """Truncation, sampling and noise parts of the reconstruction error.

    E_B   = ||f - F^-1 F_B f||               (fine Gauss-Legendre in xi)
    E_h   = ||F^-1 F_B f - left-point-h sum||
    E_eps = mean over trials of ||left-point-h sum of the noise||
    E_I   = |E_rec - ||f - I_h f_rec|| |       (noise-free, I_h piecewise affine)
    All norms on a fine left-point grid of ``n_fine`` nodes.
    """
    grid = FrequencyGrid(B, h)
    x = _fine_grid(n_fine)
    f = spec(x)
    exact_band = _band_limited_inverse(spec, B, x)
    clean = SpectralSamples(grid, noiseless_measurement(spec, grid), MEASUREMENT_PREFACTOR)
    quad_band = direct_inverse_oracle(clean, x=x)
    E_B = _fine_norm(f - exact_band)
    E_h = _fine_norm(exact_band - quad_band)

    noise = NoiseModel(delta, seed)
    if delta > 0:
        eps = noise.draw_batch(trials, grid.sample_count)
        noise_rec = direct_inverse_oracle(SpectralSamples(grid, eps, MEASUREMENT_PREFACTOR), x=x)
        E_eps = float(np.mean(np.sqrt(2.0 / n_fine * np.sum(np.abs(noise_rec) ** 2, axis=-1))))
    else:
        E_eps = 0.0

    m = grid.sample_count
    rec = frft_inverse_values(clean)
    E_rec = reconstruction_error(rec, spec)
    right = direct_inverse_oracle(clean, x=np.array([1.0]))[0]
    nodes = np.append(output_nodes(m), 1.0)
    vals = np.append(rec, right)
    interp = np.interp(x, nodes, vals.real) + 1j * np.interp(x, nodes, vals.imag)
    E_I = abs(E_rec - _fine_norm(f - interp))
    return {"E_B": E_B, "E_h": E_h, "E_eps": E_eps, "E_I": E_I, "E_rec": E_rec}
