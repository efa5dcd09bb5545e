import numpy as np
import pytest

from truncft.harmonic import (
    ConvergenceError,
    conforming_mesh,
    exact_harmonic_measure,
    exact_measure_on_axis,
    solve_harmonic_measure,
)

# (2/pi) arcsin(sinh(pi B/2L) / sinh(pi B0/2L)), 40-digit mpmath
AXIS_ORACLE = [((2.0, 1.0, 1.0), 0.1277131197067579081), ((3.0, 0.5, 0.25), 8.9255783209629078578e-05)]


@pytest.fixture(scope="module")
def field():
    return solve_harmonic_measure(1.0, 2.0, mesh=1 / 32)


@pytest.mark.parametrize("args,expected", AXIS_ORACLE)
def test_axis_formula_against_oracle(args, expected):
    assert exact_measure_on_axis(*args) == pytest.approx(expected, rel=1e-13)


def test_axis_formula_matches_full_conformal_map():
    for B0 in (2.5, 3.0, 5.0):
        assert exact_harmonic_measure(B0 + 0j, 1.0, 2.0) == pytest.approx(exact_measure_on_axis(B0, 1.0, 2.0), abs=1e-13)


def test_axis_formula_survives_huge_arguments():
    v = exact_measure_on_axis(400.0, 0.1, 1.0)
    assert v == 0.0 or np.isfinite(v)
    assert exact_measure_on_axis(1.0, 0.3, 1.0) == 1.0


def test_boundary_values(field):
    nL = int(round(field.L / field.mesh))
    nB = int(round(field.B / field.mesh))
    assert np.all(field.values[nL, : nB + 1] == 1.0)
    assert np.all(field.values[0] == 0) and np.all(field.values[-1] == 0)
    assert np.all(field.values[:, -1] == 0)


def test_maximum_principle(field):
    assert field.values.min() >= 0.0 and field.values.max() <= 1.0
    assert field.residual <= 1e-10


def test_symmetric_about_slit(field):
    assert np.allclose(field.values, field.values[::-1], atol=1e-12)


def test_monotone_along_axis_beyond_slit(field):
    nL = int(round(field.L / field.mesh))
    nB = int(round(field.B / field.mesh))
    tail = field.values[nL, nB:]
    assert np.all(np.diff(tail) <= 1e-14)


def test_fd_matches_exact_map(field):
    rng = np.random.default_rng(3)
    z = rng.uniform(0, 6, 200) + 1j * rng.uniform(-1, 1, 200)
    assert np.max(np.abs(field(z) - exact_harmonic_measure(z, 1.0, 2.0))) < 2e-2


def test_fd_converges_on_axis():
    errs = []
    for mesh in (1 / 16, 1 / 32, 1 / 64):
        f = solve_harmonic_measure(1.0, 1.0, mesh=mesh)
        errs.append(abs(float(f(3.0 + 0j)) - exact_measure_on_axis(3.0, 1.0, 1.0)))
    assert errs[2] < errs[1] < errs[0]
    assert errs[1] / errs[2] > 1.5  # at least first order


def test_cg_matches_direct():
    a = solve_harmonic_measure(0.5, 1.0, mesh=1 / 16)
    b = solve_harmonic_measure(0.5, 1.0, mesh=1 / 16, method="cg")
    assert np.max(np.abs(a.values - b.values)) < 1e-9


def test_cg_iteration_cap_raises():
    with pytest.raises(ConvergenceError):
        solve_harmonic_measure(1.0, 1.0, mesh=1 / 32, method="cg", maxiter=3)


def test_validation():
    with pytest.raises(ValueError):
        solve_harmonic_measure(1.0, 1.0, truncation_length=2.0)
    with pytest.raises(ValueError):
        solve_harmonic_measure(1.0, 1.01, mesh=1 / 16)
    with pytest.raises(ValueError):
        solve_harmonic_measure(1.0, 1.0, method="jacobi")


def test_field_rejects_outside_points(field):
    with pytest.raises(ValueError):
        field(np.array([1 + 2j]))


def test_conforming_mesh():
    m = conforming_mesh(1 / 64, 1.4, 4.9)
    assert m <= 1 / 64
    assert abs(1.4 / m - round(1.4 / m)) < 1e-9 and abs(4.9 / m - round(4.9 / m)) < 1e-9
    with pytest.raises(ValueError):
        conforming_mesh(1 / 64, np.pi)


def test_csv(tmp_path, field):
    p = tmp_path / "w.csv"
    small = solve_harmonic_measure(0.5, 0.5, mesh=1 / 4)
    small.to_csv(p)
    rows = p.read_text().splitlines()
    assert rows[0] == "x,y,w"
    assert len(rows) == 1 + small.values.size
