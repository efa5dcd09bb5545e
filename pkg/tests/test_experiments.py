import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from truncft.experiments import (
    ConfigError,
    ExperimentConfig,
    NoiseModel,
    critical_analysis,
    critical_bandwidth,
    error_decomposition,
    fit_critical_line,
    generate_measurement,
    load_config,
    noise_error_bound_check,
    noise_scaling,
    persistent_crossing,
    reconstruction_error,
    sweep_error_vs_bandwidth,
)
from truncft.signals import EigenfunctionSpec
from truncft.transform import FrequencyGrid, frft_inverse


def _err(k, B, delta=0.0, trial=0):
    spec = EigenfunctionSpec(k)
    meas = generate_measurement(spec, FrequencyGrid.from_rate(B, 16), NoiseModel(delta, 0), trial)
    return reconstruction_error(frft_inverse(meas), spec)


def test_noise_is_deterministic_per_trial():
    a = NoiseModel(0.1, 7).draw(3, 50)
    assert np.array_equal(a, NoiseModel(0.1, 7).draw(3, 50))
    assert not np.array_equal(a, NoiseModel(0.1, 7).draw(4, 50))
    assert not np.array_equal(a, NoiseModel(0.1, 8).draw(3, 50))


def test_noise_statistics():
    e = NoiseModel(0.05, 1).draw_batch(200, 500) / 0.05
    assert abs(e.real.mean()) < 0.01 and abs(e.imag.mean()) < 0.01
    assert e.real.var() == pytest.approx(1.0, abs=0.02)
    assert e.imag.var() == pytest.approx(1.0, abs=0.02)
    assert abs(np.mean(e.real * e.imag)) < 0.01


def test_negative_noise_rejected():
    with pytest.raises(ValueError):
        NoiseModel(-0.1)


def test_error_drops_across_critical_bandwidth():
    assert _err(4, np.pi) >= 5 * _err(4, 3 * np.pi)
    assert _err(4, 4 * np.pi) < 0.1


@settings(max_examples=10, deadline=None)
@given(k=st.integers(1, 20))
def test_monotone_trend_invariant(k):
    w = k * np.pi / 2
    assert _err(k, 0.5 * w) >= 5 * _err(k, 2 * w)


def test_reconstruction_error_accepts_batches():
    spec = EigenfunctionSpec(3)
    x = np.vstack([spec(np.linspace(-1, 1, 32, endpoint=False))] * 2)
    assert np.allclose(reconstruction_error(x, spec), 0.0)


def test_decomposition_refinement():
    spec = EigenfunctionSpec(4)
    d1 = error_decomposition(spec, 12.0, 0.1, 0.05, 20)
    d2 = error_decomposition(spec, 12.0, 0.05, 0.05, 20)
    assert d2["E_h"] / d1["E_h"] == pytest.approx(0.5, abs=0.05)
    assert d2["E_I"] < d1["E_I"] / 3
    assert d2["E_B"] == pytest.approx(d1["E_B"], rel=1e-12)
    narrow = error_decomposition(spec, np.pi, np.pi / 16, 0.0, 1)
    wide = error_decomposition(spec, 4 * np.pi, np.pi / 16, 0.0, 1)
    assert wide["E_B"] < narrow["E_B"] / 10
    assert narrow["E_eps"] == 0.0


def test_noise_floor_and_sqrt_growth():
    spec = EigenfunctionSpec(4)
    B = np.array([10.0, 15.0, 20.0, 30.0, 40.0])
    ns = noise_scaling(spec, B, 0.05, 50)
    assert np.all(ns.mean >= 0.5 * 0.05)
    excess = ns.mean - ns.noise_free
    slope, icpt = np.polyfit(np.sqrt(B), excess, 1)
    pred = slope * np.sqrt(B) + icpt
    r2 = 1 - np.sum((excess - pred) ** 2) / np.sum((excess - excess.mean()) ** 2)
    assert slope > 0 and r2 > 0.8
    assert ns.hard_bound_fraction == 1.0


def test_noise_bound_report():
    r = noise_error_bound_check(EigenfunctionSpec(5), 10.0, 0.05, 30)
    assert r.errors.shape == (30,)
    assert np.all(r.hard_bound_holds)
    assert 0 < r.excess_coefficient < 3


def test_persistent_crossing():
    B = np.arange(1.0, 8.0)
    assert persistent_crossing(B, [0.9, 0.6, 0.4, 0.6, 0.3, 0.2, 0.1], 0.5) == 5.0
    assert persistent_crossing(B, [0.1] * 7, 0.5) == 1.0
    assert persistent_crossing(B, [0.9, 0.4, 0.3, 0.3, 0.4, 0.5, 0.6], 0.5) == np.inf


def test_fit_line_recovers_exact_line():
    pts = [(k, 1.5 * k + 0.25) for k in range(2, 9)] + [(9, np.inf)]
    line = fit_critical_line(pts)
    assert line.C == pytest.approx(1.5, rel=1e-12)
    assert line.offset == pytest.approx(0.25, abs=1e-12)
    assert line.n_points == 7
    with pytest.raises(ValueError):
        fit_critical_line([(1, 1.0), (2, np.inf)])


def test_small_sweep_and_analysis(tmp_path):
    cfg = ExperimentConfig(k_list=(2, 3, 4), B_grid=tuple(np.arange(1.0, 16.5, 0.5)), delta_list=(0.0,), trials=1)
    rep = critical_analysis(sweep_error_vs_bandwidth(cfg))
    crit = dict(rep.critical[(0.0, 0.5)])
    assert crit[2] < crit[3] < crit[4]
    assert crit[3] == critical_bandwidth(rep, 3, 0.5, 0.0)
    assert rep.fits[(0.0, 0.5)]["C"] > 1.0
    rep.to_csv(tmp_path / "s.csv")
    rows = (tmp_path / "s.csv").read_text().splitlines()
    assert rows[0] == "k,B,delta,mean_err,stderr,trials" and len(rows) == 1 + 3 * 31
    rep.to_json(tmp_path / "s.json")
    assert "fits" in json.loads((tmp_path / "s.json").read_text())


def test_sweep_is_bitwise_reproducible():
    cfg = ExperimentConfig(k_list=(3,), B_grid=(4.0, 6.0), delta_list=(0.05,), trials=5, seed=11)
    a = sweep_error_vs_bandwidth(cfg).cells
    b = sweep_error_vs_bandwidth(cfg).cells
    assert a == b


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(B_grid=(2.0, 1.0))
    with pytest.raises(ValueError):
        ExperimentConfig(rate=0.5)
    with pytest.raises(ValueError):
        ExperimentConfig(k_list=(0,))


def test_load_config(tmp_path):
    p = tmp_path / "c.ini"
    p.write_text("[experiment]\nk = 2, 3\nbandwidths = 1:3:0.5\ndeltas = 0, 0.05\ntrials = 7\nseed = 4\n")
    cfg = load_config(p)
    assert cfg.k_list == (2, 3)
    assert cfg.B_grid == pytest.approx((1.0, 1.5, 2.0, 2.5, 3.0))
    assert cfg.delta_list == (0.0, 0.05) and cfg.trials == 7 and cfg.seed == 4


def test_load_config_reports_line(tmp_path):
    p = tmp_path / "bad.ini"
    p.write_text("[experiment]\nk = 2\nbandwith = 3\n")
    with pytest.raises(ConfigError, match=r"bad.ini:3: unknown key"):
        load_config(p)


@pytest.mark.parametrize("name", ["error_vs_bandwidth.ini", "quick.ini"])
def test_shipped_configs_load(name):
    from pathlib import Path

    cfg = load_config(Path(__file__).parent.parent / "scripts" / "configs" / name)
    assert cfg.k_list and cfg.B_grid[0] > 0
