"""Explicit stability constants for inverting the truncated Fourier transform,
and numerical checks of the inequalities they rest on."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.special

from . import harmonic
from .signals import EigenfunctionSpec, FrequencyNumber, eval_eigenfunction, l2_norm
from .transform import eigenfunction_spectrum

LOG_MAX_FLOAT = np.log(np.finfo(float).max)


@dataclass(frozen=True)
class StabilityParams:
    L: float
    B0: float
    B: float
    gamma: float
    omega: FrequencyNumber | None = None

    def __post_init__(self):
        if not self.gamma > 1:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")
        if not (self.L > 0 and self.B > 0 and self.B0 > 0):
            raise ValueError("L, B and B0 must be positive")
        if not self.B < self.B0:
            raise ValueError(f"need B < B0 (got B={self.B}, B0={self.B0})")
        if self.omega is not None and self.B0 < np.sqrt(self.gamma) * float(self.omega) * (1 - 1e-12):
            raise ValueError("need B0 >= sqrt(gamma) * omega")

    @property
    def amplitude_ratio(self) -> float:
        """2 B0 / (1 - 1/gamma): inverse squared lower bound on sup |f_hat| over [0, B0)."""
        return 2 * self.B0 / (1 - 1 / self.gamma)


@dataclass(frozen=True)
class StabilityConstant:
    value: float
    log_value: float
    overflow: bool


@dataclass(frozen=True)
class InequalityReport:
    lhs: float
    rhs: float
    holds: bool

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs if self.rhs > 0 else np.inf


def large_truncation_factor(omega: float, B: float) -> float:
    """(1 - omega^2 / B^2)^(-1/2); only meaningful for B > omega."""
    omega = float(omega)
    if not B > omega:
        raise ValueError(f"bound is vacuous for B <= omega (B={B}, omega={omega})")
    return float(1 / np.sqrt(1 - (omega / B) ** 2))


def gamma_constant(gamma: float) -> float:
    if not gamma > 1:
        raise ValueError("gamma must exceed 1")
    return float((1 - 1 / gamma) ** -0.5)


def _log_expm1(x: float) -> float:
    if x > 30:
        return x + np.log1p(-np.exp(-x))
    return float(np.log(np.expm1(x)))


def eta(L: float, B0: float, B: float) -> float:
    """Closed-form lower bound for the harmonic measure w_L(B0, B).

    (2/pi) arctan(t / sqrt(1 - t^2)) with t = ((e^B - 1)/(e^B0 - 1))^(pi/2L),
    which is the original ratio with (e^B0 - 1)^(pi/2L) divided out; t is
    formed in log space so large B0 / small L cannot overflow. At B = B0 the
    value is exactly 1.
    """
    if not (L > 0 and 0 < B <= B0):
        raise ValueError("need L > 0 and 0 < B <= B0")
    if B == B0:
        return 1.0
    log_t = np.pi / (2 * L) * (_log_expm1(B) - _log_expm1(B0))
    t = np.exp(log_t)
    one_minus_t2 = -np.expm1(2 * log_t)
    return float(2 / np.pi * np.arctan2(t, np.sqrt(one_minus_t2)))


def prefactor_c(B: float) -> float:
    """(B^(1/4)/pi^(1/4) + 2/sqrt(B))^2, the Gagliardo-Nirenberg prefactor."""
    return float((B**0.25 / np.pi**0.25 + 2 / np.sqrt(B)) ** 2)


def small_truncation_constant(params: StabilityParams | tuple, exponent: float) -> StabilityConstant:
    """c * (2B0/(1-1/gamma))^(1/w) * exp(2L(1-w)/w) for w = ``exponent``.

    ``params`` may be a StabilityParams or a raw ``(L, B0, B, gamma)`` tuple;
    the tuple form allows B == B0, the limit point. Overflow is reported via
    the flag with value +inf.
    """
    if isinstance(params, StabilityParams):
        L, B0, B, gamma = params.L, params.B0, params.B, params.gamma
    else:
        L, B0, B, gamma = params
    if not (0 < exponent <= 1):
        raise ValueError(f"exponent must lie in (0, 1], got {exponent}")
    log_k = (
        np.log(prefactor_c(B))
        + np.log(2 * B0 / (1 - 1 / gamma)) / exponent
        + 2 * L * (1 - exponent) / exponent
    )
    if log_k > LOG_MAX_FLOAT:
        return StabilityConstant(np.inf, float(log_k), True)
    return StabilityConstant(float(np.exp(log_k)), float(log_k), False)


def small_truncation_limit(B0: float, gamma: float) -> float:
    """Limit of the constant as B increases to B0 (where w = 1)."""
    return prefactor_c(B0) * 2 * B0 / (1 - 1 / gamma)


def _trapezoid_norm(u: np.ndarray, dx: float) -> float:
    a = np.abs(u) ** 2
    return float(np.sqrt(dx * (a.sum() - 0.5 * (a[0] + a[-1]))))


def gn_inequality_check(samples, spacing: float) -> InequalityReport:
    """sup|u| <= sqrt(2) ||u||^(1/2) ||u'||^(1/2) + sqrt(8/B) ||u|| on [0, B].

    ``samples`` are u at 0, spacing, ..., B (both ends included). Norms use the
    trapezoid rule, the derivative second-order finite differences.
    """
    u = np.asarray(samples)
    if u.size < 3:
        raise ValueError("need at least 3 samples")
    B = spacing * (u.size - 1)
    du = np.gradient(u, spacing, edge_order=2)
    nu = _trapezoid_norm(u, spacing)
    ndu = _trapezoid_norm(du, spacing)
    lhs = float(np.max(np.abs(u)))
    rhs = float(np.sqrt(2) * np.sqrt(nu * ndu) + np.sqrt(8) / np.sqrt(B) * nu)
    return InequalityReport(lhs, rhs, lhs <= rhs)


@dataclass(frozen=True)
class EtaMeasureReport:
    eta: float
    w: float
    eta_le_w: bool
    mesh: float
    w_exact: float


def eta_vs_measure_check(L: float, B0: float, B: float, mesh: float = 1 / 64, budget: float | None = None) -> EtaMeasureReport:
    """Compare the closed-form eta with the finite-difference w_L(B0, B).

    Passes when eta <= w_fd + budget (default 5 * mesh). The mesh is refined
    slightly if needed so that it divides L and B.
    """
    if not (0 < L < np.pi / 2):
        raise ValueError("the eta comparison needs 0 < L < pi/2")
    if not 0 < B < B0:
        raise ValueError("need 0 < B < B0")
    mesh = harmonic.conforming_mesh(mesh, L, B)
    X = float(np.ceil(max(4 * B, 4 * L, 8.0, B0 + 4 * L)))
    field = harmonic.solve_harmonic_measure(L, B, X, mesh)
    w = float(field(complex(B0)))
    e = eta(L, B0, B)
    budget = 5 * mesh if budget is None else budget
    return EtaMeasureReport(e, w, e <= w + budget, mesh, harmonic.exact_measure_on_axis(B0, L, B))


@dataclass(frozen=True)
class TwoConstantsReport:
    m: float
    M: float
    points: np.ndarray
    abs_values: np.ndarray
    bounds: np.ndarray
    w: np.ndarray
    holds: np.ndarray

    @property
    def all_hold(self) -> bool:
        return bool(np.all(self.holds))


@dataclass(frozen=True)
class TwoConstantsWitness:
    sup_bound: float
    slit_bound: float
    measure: float = 0.0

    def __post_init__(self):
        if not (0 < self.slit_bound <= self.sup_bound):
            raise ValueError("need 0 < m <= M")
        if not (0 <= self.measure <= 1):
            raise ValueError("measure must lie in [0, 1]")


def eigenfunction_witness(spec: EigenfunctionSpec, L: float, B: float, n_slit: int = 4001) -> TwoConstantsWitness:
    """M = ||f||_{L2} e^L / sqrt(pi) and m = sup over the slit of |f_hat|.

    ||f_k|| = 1 exactly. The slit sup is taken on a dense grid and then the
    Hermitian symmetry assumption sup_[0,B) = sup_(-B,B) is asserted.
    """
    xi = np.linspace(0, B, n_slit)
    m_pos = float(np.max(np.abs(eigenfunction_spectrum(spec, xi))))
    m_neg = float(np.max(np.abs(eigenfunction_spectrum(spec, -xi))))
    if not np.isclose(m_pos, m_neg, rtol=1e-12, atol=0):
        raise AssertionError("|f_hat| is not even on the real axis")
    return TwoConstantsWitness(np.exp(L) / np.sqrt(np.pi), m_pos)


def two_constants_check(
    spec: EigenfunctionSpec,
    witness: TwoConstantsWitness,
    eval_points,
    field: harmonic.HarmonicMeasureField,
    budget: float | None = None,
) -> TwoConstantsReport:
    """|f_hat(z)| <= m^w(z) M^(1-w(z)) with w from the FD field.

    The bound is decreasing in w (m <= M), so the FD error is absorbed by
    evaluating it at max(w - budget, 0); budget defaults to 5 * mesh.
    """
    z = np.asarray(eval_points, dtype=complex)
    if not np.all(field.contains(z)):
        raise ValueError("evaluation point outside the solved field")
    budget = 5 * field.mesh if budget is None else budget
    w = np.clip(field(z), 0.0, 1.0)
    w_safe = np.clip(w - budget, 0.0, 1.0)
    m, M = witness.slit_bound, witness.sup_bound
    bounds = np.exp(w_safe * np.log(m) + (1 - w_safe) * np.log(M))
    vals = np.abs(eigenfunction_spectrum(spec, z))
    return TwoConstantsReport(m, M, z, vals, bounds, w, vals <= bounds * (1 + 1e-12))


@lru_cache(maxsize=8)
def _gauss_legendre(n: int):
    return scipy.special.roots_legendre(n)


def spectral_norm_on_band(spec: EigenfunctionSpec, B: float, n: int = 4096) -> float:
    """||F_B f_k||_{L2(-B,B)} by Gauss-Legendre quadrature of the closed form."""
    t, wts = _gauss_legendre(n)
    vals = eigenfunction_spectrum(spec, B * t)
    return float(np.sqrt(B * np.sum(wts * np.abs(vals) ** 2)))


def empirical_large_truncation_check(spec: EigenfunctionSpec, B: float, slack: float = 0.01, n_space: int = 4096) -> InequalityReport:
    """||f_k|| <= (1 - omega^2/B^2)^(-1/2) ||F_B f_k|| on discrete data."""
    from .signals import frequency_number

    f = eval_eigenfunction(spec, n_space)
    omega = frequency_number(f).omega
    lhs = l2_norm(f)
    rhs = large_truncation_factor(omega, B) * spectral_norm_on_band(spec, B)
    return InequalityReport(lhs, rhs, lhs <= rhs * (1 + slack))


def empirical_stability_check(spec: EigenfunctionSpec, params: StabilityParams, n_space: int = 4096) -> InequalityReport:
    """||f_k|| <= k_{L,B0,B}(eta) ||F_B f_k|| with the eta-based constant."""
    lhs = l2_norm(eval_eigenfunction(spec, n_space))
    const = small_truncation_constant(params, eta(params.L, params.B0, params.B))
    data = spectral_norm_on_band(spec, params.B)
    rhs = np.inf if const.overflow else const.value * data
    return InequalityReport(lhs, float(rhs), bool(lhs <= rhs))
