import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from truncft.signals import (
    EigenfunctionSpec,
    FrequencyNumber,
    GridSignal,
    eval_eigenfunction,
    frequency_number,
    l2_norm,
)

# sin(k pi (x+1)/2) at x = -0.3, frozen from a 40-digit mpmath evaluation
EIGEN_AT_MINUS_03 = {1: 0.89100652418836786236, 2: 0.80901699437494742410, 5: -0.70710678118654752440}


@pytest.mark.parametrize("k,expected", EIGEN_AT_MINUS_03.items())
def test_eigenfunction_values(k, expected):
    assert EigenfunctionSpec(k)(-0.3) == pytest.approx(expected, abs=1e-14)


def test_spec_validation():
    with pytest.raises(ValueError):
        EigenfunctionSpec(0)
    with pytest.raises(ValueError):
        FrequencyNumber(-1.0)


def test_grid_signal_validation():
    with pytest.raises(ValueError):
        GridSignal(np.zeros(1))
    with pytest.raises(ValueError):
        GridSignal(np.zeros(4), a=1.0, b=-1.0)


@pytest.mark.parametrize("k", [1, 3, 8])
def test_eigenfunctions_have_unit_norm(k):
    assert l2_norm(eval_eigenfunction(EigenfunctionSpec(k), 1024)) == pytest.approx(1.0, abs=1e-12)


def test_constant_norm():
    assert l2_norm(GridSignal(np.ones(100))) == pytest.approx(np.sqrt(2), rel=1e-14)


@pytest.mark.parametrize("k", [1, 2, 4, 7])
def test_frequency_number_of_eigenfunctions(k):
    om = frequency_number(eval_eigenfunction(EigenfunctionSpec(k), 4096)).omega
    assert om == pytest.approx(k * np.pi / 2, rel=1e-5)


def test_frequency_number_second_order():
    spec = EigenfunctionSpec(3)
    errs = [abs(frequency_number(eval_eigenfunction(spec, n)).omega - spec.omega) for n in (256, 512, 1024)]
    rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(rates > 1.7)


@settings(max_examples=30, deadline=None)
@given(k=st.integers(1, 10), c=st.floats(1e-3, 1e3))
def test_frequency_number_scale_invariant(k, c):
    f = eval_eigenfunction(EigenfunctionSpec(k), 512)
    assert frequency_number(f.scaled(c)).omega == pytest.approx(frequency_number(f).omega, rel=1e-10)


def test_frequency_number_rejects_non_vanishing_ends():
    x = GridSignal(np.ones(64)).nodes
    with pytest.raises(ValueError):
        frequency_number(GridSignal(np.cos(x)))
    with pytest.raises(ValueError):
        frequency_number(GridSignal(x + 1.0))  # right end does not vanish


def test_frequency_number_lower_bound_for_bump():
    x = GridSignal(np.zeros(2048)).nodes
    om = frequency_number(GridSignal((1 - x**2) ** 2)).omega
    assert om >= np.pi / 2


def test_csv_round_trip(tmp_path):
    f = eval_eigenfunction(EigenfunctionSpec(5), 37)
    p = tmp_path / "f.csv"
    f.to_csv(p)
    g = GridSignal.from_csv(p)
    assert np.array_equal(f.values, g.values)
    assert (g.a, g.b) == (-1.0, 1.0)
