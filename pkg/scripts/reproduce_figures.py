#!/usr/bin/env python3
"""Regenerate every figure and table: sweeps, critical lines, noise scaling,
singular values and a harmonic-measure field.

    python scripts/reproduce_figures.py --out results/ [--trials 100] [--quick]
"""
import argparse
import json
import logging
import time
from pathlib import Path

import numpy as np

from truncft import experiments as ex
from truncft import svg
from truncft.harmonic import exact_harmonic_measure, solve_harmonic_measure
from truncft.signals import EigenfunctionSpec
from truncft.spectrum import build_operator, decay_fit, landau_band, singular_values

log = logging.getLogger("reproduce")
HERE = Path(__file__).resolve().parent


def sweep_and_critical(out: Path, config: Path, trials: int | None):
    cfg = ex.load_config(config)
    if trials:
        from dataclasses import replace

        cfg = replace(cfg, trials=trials)
    t0 = time.time()
    report = ex.critical_analysis(ex.sweep_error_vs_bandwidth(cfg))
    log.info("sweep of %d cells in %.1f s", len(report.cells), time.time() - t0)
    report.to_csv(out / "error_vs_bandwidth.csv")
    report.to_json(out / "error_vs_bandwidth.json")

    for delta in cfg.delta_list:
        series = []
        for k in cfg.k_list[:: max(1, len(cfg.k_list) // 6)]:
            B, e, _ = report.curve(k, delta)
            series.append({"x": B, "y": e, "label": f"k={k}"})
        svg.line_plot(series, out / f"error_vs_bandwidth_delta{delta:g}.svg",
                      title=f"mean reconstruction error, delta={delta:g}", xlabel="B", ylabel="E_rec", logy=True)

    series, fits = [], {}
    for (delta, e_cut), pts in report.critical.items():
        ks = [p[0] for p in pts]
        series.append({"x": ks, "y": [p[1] for p in pts], "label": f"e={e_cut:g}, d={delta:g}", "markers": True,
                       "dashed": delta > 0})
        fits[f"delta={delta:g},e_cut={e_cut:g}"] = report.fits[(delta, e_cut)]
    series.append({"x": list(cfg.k_list), "y": [np.pi / 2 * k for k in cfg.k_list], "label": "pi k / 2", "color": "black"})
    svg.line_plot(series, out / "critical_bandwidth.svg", title="critical bandwidth", xlabel="k", ylabel="B0")
    for name, fit in fits.items():
        log.info("%s: %s", name, "no fit" if fit is None else f"C={fit['C']:.4f} offset={fit['offset']:.3f}")
    return fits


def noise_figure(out: Path, trials: int):
    spec = EigenfunctionSpec(15)
    B = np.linspace(spec.omega, 4 * spec.omega, 13)
    ns = ex.noise_scaling(spec, B, 0.05, trials)
    svg.line_plot(
        [
            {"x": ns.B, "y": ns.noise_free, "label": "delta=0"},
            {"x": ns.B, "y": ns.mean, "label": "delta=0.05", "markers": True},
            {"x": ns.B, "y": ns.noise_free + 0.05 * np.sqrt(ns.B), "label": "+ delta sqrt(B)", "dashed": True, "color": "black"},
        ],
        out / "noise_scaling.svg", title="k=15 reconstruction error", xlabel="B", ylabel="E_rec", logy=True,
    )
    log.info("noise: c_envelope=%.3f c_lsq=%.3f hard bound %.0f%%", ns.c_envelope, ns.c_lsq, 100 * ns.hard_bound_fraction)
    return {"c_envelope": ns.c_envelope, "c_lsq": ns.c_lsq, "hard_bound_fraction": ns.hard_bound_fraction}


def spectrum_figure(out: Path):
    series, res = [], {}
    for count in (5, 10, 20):
        s = singular_values(build_operator(landau_band(count), 512, 512))
        fit = decay_fit(s, count)
        res[count] = {"plateau": fit.plateau_count, "slope": fit.decay_rate}
        keep = s > 1e-16
        series.append({"x": np.arange(1, s.size + 1)[keep][:60], "y": s[keep][:60], "label": f"count={count}", "markers": True})
    svg.line_plot(series, out / "singular_values.svg", title="singular values of F_B", xlabel="j", ylabel="sigma_j", logy=True)
    return res


def harmonic_figure(out: Path):
    field = solve_harmonic_measure(1.0, 2.0, mesh=1 / 32)
    svg.heatmap(field.values, out / "harmonic_measure.svg", (0, field.truncation_length, -1, 1), title="w(z), L=1, B=2")
    x = np.linspace(2.0, 8.0, 61)
    svg.line_plot(
        [{"x": x, "y": field(x + 0j), "label": "finite differences"},
         {"x": x, "y": exact_harmonic_measure(x + 0j, 1.0, 2.0), "label": "conformal map", "dashed": True}],
        out / "harmonic_measure_axis.svg", title="w on the real axis", xlabel="x", ylabel="w", logy=True,
    )


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", default="results")
    p.add_argument("--trials", type=int, help="override the trial count of the sweep config")
    p.add_argument("--quick", action="store_true", help="use the small config")
    args = p.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    config = HERE / "configs" / ("quick.ini" if args.quick else "error_vs_bandwidth.ini")
    summary = {
        "critical_fits": sweep_and_critical(out, config, args.trials),
        "noise": noise_figure(out, args.trials or 100),
        "spectrum": spectrum_figure(out),
    }
    harmonic_figure(out)
    (out / "summary.json").write_text(json.dumps(summary, indent=2, default=str))
    log.info("wrote figures to %s", out)


if __name__ == "__main__":
    main()
