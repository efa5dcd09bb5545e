import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from truncft.harmonic import exact_measure_on_axis, solve_harmonic_measure
from truncft.signals import EigenfunctionSpec
from truncft.stability import (
    StabilityParams,
    TwoConstantsWitness,
    eigenfunction_witness,
    empirical_large_truncation_check,
    empirical_stability_check,
    eta,
    eta_vs_measure_check,
    gamma_constant,
    gn_inequality_check,
    large_truncation_factor,
    small_truncation_constant,
    small_truncation_limit,
    two_constants_check,
)

# 50-digit mpmath evaluations of the unsimplified formulas
ETA_ORACLE = [
    ((1.0, 2.0, 1.0), 0.081126848922641677178),
    ((1.0, 2 * np.pi, np.pi), 0.0042841553405380251272),
    ((1.0, 3.0, 1.5), 0.044009056798440714882),
    ((0.5, 3.0, 2.5), 0.11941525594766876906),
    ((1.2, 20.0, 10.0), 1.3150820191974562944e-6),
    ((0.3, 50.0, 49.0), 0.0033878297939068916292),
]


@pytest.mark.parametrize("args,expected", ETA_ORACLE)
def test_eta_against_oracle(args, expected):
    assert eta(*args) == pytest.approx(expected, rel=1e-12)


def test_constant_against_oracle():
    p = StabilityParams(1.0, 4.0, 3.0, 2.0)
    k = small_truncation_constant(p, 0.1265693549327605087)
    assert k.value == pytest.approx(14778289929950747.581, rel=1e-12)
    assert not k.overflow


def test_constant_overflow_reports_log():
    p = StabilityParams(1.0, 2 * np.pi, np.pi, 2.0)
    k = small_truncation_constant(p, eta(1.0, 2 * np.pi, np.pi))
    assert k.overflow and k.value == np.inf
    assert k.log_value == pytest.approx(1218.9276221836388195, rel=1e-12)


def test_limit_value():
    assert small_truncation_limit(2 * np.pi, 2.0) == pytest.approx(99.237466366997817973, rel=1e-14)
    assert small_truncation_constant((1.0, 2 * np.pi, 2 * np.pi, 2.0), 1.0).value == pytest.approx(
        99.237466366997817973, rel=1e-12
    )


def test_eta_limits():
    assert eta(1.0, 5.0, 5.0 - 1e-9) == pytest.approx(1.0, abs=1e-3)
    assert eta(1.0, 5.0, 1e-6) < 1e-6
    assert 0.0 <= eta(0.01, 700.0, 1.0) < 1e-300


@settings(max_examples=100, deadline=None)
@given(L=st.floats(0.05, 1.5), B0=st.floats(0.5, 200), frac=st.floats(0.01, 0.99))
def test_eta_bounded_and_below_exact_measure(L, B0, frac):
    B = frac * B0
    e = eta(L, B0, B)
    assert 0.0 <= e <= 1.0
    assert e <= exact_measure_on_axis(B0, L, B) + 1e-12


@settings(max_examples=50, deadline=None)
@given(L=st.floats(0.1, 1.5), B0=st.floats(1, 50), f1=st.floats(0.05, 0.9), df=st.floats(0.01, 0.09))
def test_eta_increasing_in_B(L, B0, f1, df):
    assert eta(L, B0, f1 * B0) <= eta(L, B0, (f1 + df) * B0)


def test_params_validation():
    with pytest.raises(ValueError):
        StabilityParams(1.0, 2.0, 2.0, 2.0)
    with pytest.raises(ValueError):
        StabilityParams(1.0, 2.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        StabilityParams(1.0, 2.0, 1.0, 4.0, omega=3.0)
    assert StabilityParams(1.0, 2.0, 1.0, 2.0).amplitude_ratio == pytest.approx(8.0)


def test_large_truncation_factor():
    assert large_truncation_factor(3.0, 5.0) == pytest.approx(1.25)
    assert gamma_constant(4.0) == pytest.approx(2 / np.sqrt(3))
    with pytest.raises(ValueError):
        large_truncation_factor(3.0, 3.0)


@pytest.mark.parametrize("u,B", [(lambda x: np.ones_like(x), 1.0), (lambda x: np.sin(3 * x), 4.0), (lambda x: x**2, 0.5)])
def test_gn_examples(u, B):
    x = np.linspace(0, B, 2001)
    r = gn_inequality_check(u(x), x[1] - x[0])
    assert r.holds


def test_gn_constant_case_is_tight_within_factor():
    # u = 1 on [0, B]: sup = 1, rhs = sqrt(8/B) * sqrt(B) = sqrt(8)
    x = np.linspace(0, 2.0, 101)
    r = gn_inequality_check(np.ones_like(x), x[1] - x[0])
    assert r.rhs == pytest.approx(np.sqrt(8), rel=1e-12)


@pytest.mark.parametrize("args", [(1.0, 3.0, 1.5), (1.4, 5.0, 4.9), (0.5, 2.0, 0.25)])
def test_eta_vs_fd_measure(args):
    r = eta_vs_measure_check(*args, mesh=1 / 32)
    assert r.eta_le_w
    assert r.eta <= r.w_exact
    assert abs(r.w - r.w_exact) < 5 * r.mesh


def test_eta_vs_fd_requires_narrow_strip():
    with pytest.raises(ValueError):
        eta_vs_measure_check(2.0, 3.0, 1.0)


def test_witness_and_two_constants():
    spec = EigenfunctionSpec(4)
    wit = eigenfunction_witness(spec, 1.0, 2.0)
    assert wit.sup_bound == pytest.approx(np.e / np.sqrt(np.pi))
    assert 0 < wit.slit_bound <= wit.sup_bound
    field = solve_harmonic_measure(1.0, 2.0, mesh=1 / 32)
    rng = np.random.default_rng(0)
    z = rng.uniform(0, 6, 40) + 1j * rng.uniform(-0.99, 0.99, 40)
    rep = two_constants_check(spec, wit, z, field)
    assert rep.all_hold
    with pytest.raises(ValueError):
        TwoConstantsWitness(1.0, 2.0)


def test_empirical_large_truncation():
    spec = EigenfunctionSpec(3)
    for factor in (1.1, 2.0):
        assert empirical_large_truncation_check(spec, factor * spec.omega).holds


def test_empirical_stability_example():
    spec = EigenfunctionSpec(2)
    p = StabilityParams(1.0, 2 * spec.omega, 1.5, 2.0, omega=spec.omega)
    r = empirical_stability_check(spec, p)
    assert r.holds and r.rhs > r.lhs
