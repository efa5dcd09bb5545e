"""Command-line front end: ``truncft <command> [options]``.

Exit codes: 0 success, 2 usage, 3 validation, 4 numerical failure.
Every command writes ``<command>_manifest.json`` next to its outputs.
Default output directory: ``$TRUNCFT_OUT`` or the current directory.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from . import __version__
from . import experiments as ex
from . import harmonic, spectrum, stability, svg
from .signals import EigenfunctionSpec, GridSignal, eval_eigenfunction
from .transform import (
    FrequencyGrid,
    SpectralSamples,
    eigenfunction_spectrum,
    forward_truncated,
    frft_inverse_values,
)

EXIT_USAGE, EXIT_VALIDATION, EXIT_NUMERICAL = 2, 3, 4


class ValidationError(ValueError):
    pass


def _g(x: float) -> str:
    return "inf" if np.isinf(x) else f"{x:.17g}"


def _jsonable(o):
    if isinstance(o, dict):
        return {str(k): _jsonable(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_jsonable(v) for v in o]
    if isinstance(o, (np.floating, float)):
        o = float(o)
        return o if np.isfinite(o) else ("inf" if o > 0 else ("-inf" if o < 0 else "nan"))
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.bool_,)):
        return bool(o)
    return o


def _out_dir(args) -> Path:
    d = Path(args.out)
    d.mkdir(parents=True, exist_ok=True)
    return d


def _manifest(args, outputs, t0, extra=None) -> Path:
    cfg = {k: v for k, v in vars(args).items() if k != "func"}
    data = {
        "command": args.command,
        "config": cfg,
        "seed": args.seed,
        "version": __version__,
        "outputs": [str(p) for p in outputs],
        "duration_s": time.time() - t0,
    }
    if extra:
        data.update(extra)
    path = _out_dir(args) / f"{args.command}_manifest.json"
    path.write_text(json.dumps(_jsonable(data), indent=2, default=str))
    return path


def _grid_from_args(args) -> FrequencyGrid:
    if args.spacing is not None:
        return FrequencyGrid(args.bandwidth, args.spacing)
    return FrequencyGrid.from_rate(args.bandwidth, args.rate)


def cmd_transform(args):
    t0 = time.time()
    spec = EigenfunctionSpec(args.k)
    grid = FrequencyGrid(args.bandwidth, args.spacing)
    if args.closed_form:
        samples = SpectralSamples(grid, eigenfunction_spectrum(spec, grid.nodes))
    else:
        samples = forward_truncated(eval_eigenfunction(spec, args.n_space), grid)
    path = _out_dir(args) / f"transform_k{args.k}.csv"
    samples.to_csv(path)
    _manifest(args, [path], t0)
    print(f"wrote {grid.sample_count} samples to {path}")


def _read_spectral_csv(path) -> SpectralSamples:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    xi = data[:, 0]
    h = xi[1] - xi[0]
    grid = FrequencyGrid(-xi[0], h)
    return SpectralSamples(grid, data[:, 1] + 1j * data[:, 2])


def cmd_reconstruct(args):
    t0 = time.time()
    if args.input:
        meas = _read_spectral_csv(args.input)
        spec = None
    else:
        if args.k is None:
            raise ValidationError("give --k or --input")
        spec = EigenfunctionSpec(args.k)
        meas = ex.generate_measurement(spec, _grid_from_args(args), ex.NoiseModel(args.delta, args.seed))
    rec = frft_inverse_values(meas, args.n_out)
    sig = GridSignal(rec.real)
    path = _out_dir(args) / "reconstruction.csv"
    sig.to_csv(path)
    extra = {}
    if spec is not None:
        err = ex.reconstruction_error(rec, spec)
        extra["E_rec"] = err
        print(json.dumps({"E_rec": err, "M": meas.grid.sample_count}))
    _manifest(args, [path], t0, extra)


def cmd_stability(args):
    t0 = time.time()
    try:
        params = stability.StabilityParams(args.L, args.B0, args.B, args.gamma)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc
    c = stability.prefactor_c(args.B)
    e = stability.eta(args.L, args.B0, args.B)
    k_eta = stability.small_truncation_constant(params, e)
    result = {"c": c, "eta": e, "k_eta": k_eta.value, "k_eta_log": k_eta.log_value, "k_eta_overflow": k_eta.overflow}
    if not args.no_fd:
        mesh = harmonic.conforming_mesh(args.mesh, args.L, args.B)
        X = float(np.ceil(max(4 * args.B, 4 * args.L, 8.0, args.B0 + 4 * args.L)))
        field = harmonic.solve_harmonic_measure(args.L, args.B, X, mesh)
        w = float(np.clip(field(complex(args.B0)), 1e-300, 1.0))
        k_w = stability.small_truncation_constant(params, w)
        result.update({"w_fd": w, "k_w": k_w.value, "k_w_log": k_w.log_value, "k_w_overflow": k_w.overflow, "mesh": mesh})
    print(json.dumps(_jsonable(result)))
    _manifest(args, [], t0, {"result": result})


def cmd_harmonic(args):
    t0 = time.time()
    mesh = harmonic.conforming_mesh(args.mesh, args.L, args.B)
    X = args.length or float(np.ceil(max(4 * args.B, 4 * args.L, 8.0)))
    field = harmonic.solve_harmonic_measure(args.L, args.B, X, mesh, method=args.method)
    d = _out_dir(args)
    csv_path, svg_path = d / "harmonic_measure.csv", d / "harmonic_measure.svg"
    field.to_csv(csv_path)
    svg.heatmap(field.values, svg_path, (0, X, -args.L, args.L), title=f"harmonic measure, L={args.L}, B={args.B}")
    extra = {"residual": field.residual, "mesh": mesh}
    if args.at is not None:
        extra["w_at"] = float(field(complex(args.at)))
        print(json.dumps({"x": args.at, "w": extra["w_at"]}))
    _manifest(args, [csv_path, svg_path], t0, extra)


def cmd_spectrum(args):
    t0 = time.time()
    band = spectrum.landau_band(args.bandwidth) if args.landau else args.bandwidth
    op = spectrum.build_operator(band, args.n, args.n, args.quadrature)
    s = spectrum.singular_values(op)
    d = _out_dir(args)
    csv_path, svg_path = d / "spectrum.csv", d / "spectrum.svg"
    with open(csv_path, "w") as fh:
        fh.write("index,sigma\n")
        for i, v in enumerate(s, 1):
            fh.write(f"{i},{v:.17g}\n")
    keep = s > 1e-17
    svg.line_plot(
        [{"x": np.arange(1, s.size + 1)[keep][:80], "y": s[keep][:80], "label": "sigma_j", "markers": True}],
        svg_path, title=f"singular values, B={args.bandwidth}", xlabel="j", ylabel="sigma", logy=True,
    )
    extra = {"angular_band": band}
    try:
        fit = spectrum.decay_fit(s, args.bandwidth if args.landau else 2 * args.bandwidth / np.pi)
        extra.update(plateau_count=fit.plateau_count, decay_rate=fit.decay_rate)
    except ValueError:
        pass
    print(json.dumps(_jsonable(extra)))
    _manifest(args, [csv_path, svg_path], t0, extra)


def _load(args) -> ex.ExperimentConfig:
    try:
        cfg = ex.load_config(args.config)
    except (OSError, ex.ConfigError) as exc:
        raise ValidationError(str(exc)) from exc
    if args.trials is not None or args.seed_given:
        kw = {}
        if args.trials is not None:
            kw["trials"] = args.trials
        if args.seed_given:
            kw["seed"] = args.seed
        cfg = replace(cfg, **kw)
    return cfg


def _sweep_svg(report, path):
    series = []
    for k in report.config.k_list:
        for d in report.config.delta_list:
            B, e, _ = report.curve(k, d)
            series.append({"x": B, "y": e, "label": f"k={k}, delta={d:g}"})
    svg.line_plot(series[:8], path, title="reconstruction error vs bandwidth", xlabel="B", ylabel="mean E_rec", logy=True)


def cmd_sweep(args):
    t0 = time.time()
    cfg = _load(args)
    report = ex.sweep_error_vs_bandwidth(cfg)
    d = _out_dir(args)
    paths = [d / "sweep.csv", d / "sweep.json", d / "sweep.svg"]
    report.to_csv(paths[0])
    report.to_json(paths[1])
    _sweep_svg(report, paths[2])
    _manifest(args, paths, t0, {"resolved_config": asdict(cfg)})
    print(f"{len(report.cells)} cells written to {paths[0]}")


def cmd_critical(args):
    t0 = time.time()
    cfg = _load(args)
    report = ex.critical_analysis(ex.sweep_error_vs_bandwidth(cfg))
    d = _out_dir(args)
    csv_path, json_path, svg_path = d / "critical.csv", d / "critical.json", d / "critical.svg"
    series = []
    with open(csv_path, "w") as fh:
        fh.write("k,delta,e_cut,B0\n")
        for (delta, e_cut), pts in report.critical.items():
            for k, b in pts:
                fh.write(f"{k},{delta:.17g},{e_cut:.17g},{_g(b)}\n")
                print(f"k={k} delta={delta:g} e_cut={e_cut:g} B0={_g(b)}")
            series.append({"x": [p[0] for p in pts], "y": [p[1] for p in pts], "label": f"e_cut={e_cut:g}, delta={delta:g}", "markers": True})
    fits = {f"delta={d_:g},e_cut={e:g}": v for (d_, e), v in report.fits.items()}
    json_path.write_text(json.dumps(_jsonable({"fits": fits, "config": asdict(cfg)}), indent=2))
    svg.line_plot(series, svg_path, title="critical bandwidth", xlabel="k", ylabel="B0")
    for name, v in fits.items():
        print(f"fit {name}: " + ("none (fewer than 3 finite points)" if v is None else f"C={v['C']:.4f} offset={v['offset']:.4f}"))
    _manifest(args, [csv_path, json_path, svg_path], t0, {"fits": fits, "resolved_config": asdict(cfg)})


def cmd_noise_bound(args):
    t0 = time.time()
    spec = EigenfunctionSpec(args.k)
    if args.bandwidths:
        B_values = [float(b) for b in args.bandwidths]
    else:
        B_values = list(np.linspace(spec.omega, 4 * spec.omega, 13))
    res = ex.noise_scaling(spec, B_values, args.delta, args.trials, args.rate, args.seed)
    d = _out_dir(args)
    csv_path, svg_path = d / "noise_bound.csv", d / "noise_bound.svg"
    with open(csv_path, "w") as fh:
        fh.write("B,noise_free,mean_err,overlay\n")
        for B, nf, m in zip(res.B, res.noise_free, res.mean):
            fh.write(f"{B:.17g},{nf:.17g},{m:.17g},{nf + args.delta * np.sqrt(B):.17g}\n")
    svg.line_plot(
        [
            {"x": res.B, "y": res.noise_free, "label": "noise-free"},
            {"x": res.B, "y": res.mean, "label": f"delta={args.delta:g}"},
            {"x": res.B, "y": res.noise_free + args.delta * np.sqrt(res.B), "label": "noise-free + delta sqrt(B)", "dashed": True, "color": "black"},
        ],
        svg_path, title=f"noise scaling, k={args.k}", xlabel="B", ylabel="mean E_rec", logy=True,
    )
    summary = {"c_envelope": res.c_envelope, "c_lsq": res.c_lsq, "hard_bound_fraction": res.hard_bound_fraction}
    print(json.dumps(summary))
    _manifest(args, [csv_path, svg_path], t0, summary)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=os.environ.get("TRUNCFT_OUT", "."), help="output directory")
    common.add_argument("--seed", type=int, default=None)

    p = argparse.ArgumentParser(prog="truncft", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("transform", parents=[common], help="sample the truncated transform of f_k")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--bandwidth", type=float, required=True)
    s.add_argument("--spacing", type=float, required=True)
    s.add_argument("--closed-form", action="store_true", help="use the analytic transform instead of quadrature")
    s.add_argument("--n-space", type=int, default=4096)
    s.set_defaults(func=cmd_transform)

    s = sub.add_parser("reconstruct", parents=[common], help="FRFT reconstruction from (noisy) samples")
    s.add_argument("--k", type=int)
    s.add_argument("--input", help="CSV xi,re,im of unitary transform samples")
    s.add_argument("--bandwidth", type=float, default=10.0)
    s.add_argument("--spacing", type=float)
    s.add_argument("--rate", type=float, default=ex.DEFAULT_RATE)
    s.add_argument("--delta", type=float, default=0.0)
    s.add_argument("--n-out", type=int)
    s.set_defaults(func=cmd_reconstruct)

    s = sub.add_parser("stability", parents=[common], help="explicit stability constants")
    s.add_argument("--L", type=float, required=True)
    s.add_argument("--B0", type=float, required=True)
    s.add_argument("--B", type=float, required=True)
    s.add_argument("--gamma", type=float, required=True)
    s.add_argument("--mesh", type=float, default=1 / 32)
    s.add_argument("--no-fd", action="store_true", help="skip the finite-difference harmonic measure")
    s.set_defaults(func=cmd_stability)

    s = sub.add_parser("harmonic-measure", parents=[common], help="FD harmonic measure of the slit")
    s.add_argument("--L", type=float, required=True)
    s.add_argument("--B", type=float, required=True)
    s.add_argument("--mesh", type=float, default=1 / 32)
    s.add_argument("--length", type=float)
    s.add_argument("--method", choices=["direct", "cg"], default="direct")
    s.add_argument("--at", type=float, help="report w at this point of the real axis")
    s.set_defaults(func=cmd_harmonic)

    s = sub.add_parser("spectrum", parents=[common], help="singular values of F_B")
    s.add_argument("--bandwidth", type=float, required=True)
    s.add_argument("--n", type=int, default=512)
    s.add_argument("--quadrature", choices=["left", "gauss"], default="left")
    s.add_argument("--landau", action=argparse.BooleanOptionalAction, default=True,
                   help="read --bandwidth as the time-bandwidth count (angular band pi*B/2)")
    s.set_defaults(func=cmd_spectrum)

    for name, func, help_ in (
        ("sweep", cmd_sweep, "error vs bandwidth sweep"),
        ("critical", cmd_critical, "critical bandwidths and line fits"),
    ):
        s = sub.add_parser(name, parents=[common], help=help_)
        s.add_argument("--config", required=True)
        s.add_argument("--trials", type=int)
        s.set_defaults(func=func)

    s = sub.add_parser("noise-bound", parents=[common], help="noise scaling and hard bound check")
    s.add_argument("--k", type=int, default=15)
    s.add_argument("--delta", type=float, default=0.05)
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--rate", type=float, default=ex.DEFAULT_RATE)
    s.add_argument("--bandwidths", nargs="*")
    s.set_defaults(func=cmd_noise_bound)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.seed_given = args.seed is not None
    if args.seed is None:
        args.seed = 0
    try:
        args.func(args)
    except (ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (harmonic.ConvergenceError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return 0


if __name__ == "__main__":
    sys.exit(main())
