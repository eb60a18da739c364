"""Command line driver: ``elastoinv {forward,invert-spatial,invert-temporal,selftest}``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4 I/O error.
The default output directory is taken from ``ELASTOINV_OUT`` when ``--out``
and the config leave it unset.
"""
from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import io
from .config import ExperimentConfig, load_config
from .data import FrequencySweepData, GridField, ReceiverArray, TimeSeriesData
from .errors import ConfigurationError, ElastoInvError, ParameterError
from .forward import synthesize_frequency_data_2d
from .sources import reference_fields
from .spatial import LandweberConfig, build_operator, landweber_march, operator_data, relative_l2_error
from .temporal import add_noise, paper_sweep, point_source_series, recover_temporal, ring_points
from .transforms import decouple_circle, frequency_to_time, modal_to_potentials, time_to_frequency

EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4
ENV_OUT = "ELASTOINV_OUT"


def _out_dir(args, cfg: ExperimentConfig) -> Path:
    path = args.out or cfg.output or os.environ.get(ENV_OUT) or "elastoinv-out"
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig().validate()
    if getattr(args, "seed", None) is not None:
        cfg.seed = int(args.seed)
    return cfg


def _receivers(cfg):
    return ReceiverArray.circle(cfg.receivers, cfg.R)


# ---------------------------------------------------------------------------
# forward


def run_forward(cfg: ExperimentConfig, out: Path):
    """Write synthetic data files (and truth grids) for the configured experiment."""
    med = cfg.medium()
    pulse = cfg.make_pulse()
    written = []
    t = np.arange(0.0, cfg.T + 0.5 * cfg.dt, cfg.dt)
    written.append(io.write_table(out / "pulse.csv", ["t"] + [f"g{c}" for c in range(pulse.ncomp)],
                                  np.column_stack([t, np.reshape(pulse(t), (t.size, -1))]).tolist(),
                                  {"kind": "pulse", "preset": cfg.pulse}))
    w = paper_sweep() if cfg.kind == "temporal" else np.asarray(cfg.frequencies)
    spec = np.reshape(pulse.spectrum(w), (w.size, -1))
    cols = ["omega"] + [f"{p}{c}" for c in range(spec.shape[1]) for p in ("re", "im")]
    rows = np.column_stack([w] + [part(spec[:, c]) for c in range(spec.shape[1]) for part in (np.real, np.imag)])
    written.append(io.write_table(out / "pulse_spectrum.csv", cols, rows.tolist(), {"kind": "spectrum"}))

    if cfg.kind == "temporal":
        series = point_source_series(med, pulse, ring_points(cfg.points), t)
        if cfg.delta > 0:
            series = add_noise(series, cfg.delta, cfg.seed)
        written.append(io.write_series(out / "series.csv", series))
    else:
        rec = _receivers(cfg)
        f_data, _, _ = reference_fields(cfg.data_n, cfg.R0, cfg.R0)
        f, fp, fs = reference_fields(cfg.n, cfg.R0, cfg.R0)
        for name, g in (("truth_f.csv", f), ("truth_fp.csv", fp), ("truth_fs.csv", fs)):
            written.append(io.write_grid(out / name, g))
        if cfg.time_domain:
            # Time records by inverse transform of a dense sweep; the omega = 0
            # sample (where the planar kernel is log-singular) is left out.
            dense = np.arange(1, int(round(cfg.omega_max / cfg.omega_step)) + 1) * cfg.omega_step
            sweep = synthesize_frequency_data_2d(med, f_data, pulse, dense, rec)
            u = frequency_to_time(dense, np.moveaxis(sweep.values, 2, 0), t)  # (nt, M, 2)
            series = TimeSeriesData(rec, 0.0, cfg.dt, np.transpose(u, (1, 2, 0)), {"source": "reference"})
            if cfg.delta > 0:
                series = add_noise(series, cfg.delta, cfg.seed)
            written.append(io.write_series(out / "series_full.csv", series))
        else:
            sweep = synthesize_frequency_data_2d(med, f_data, pulse, cfg.frequencies, rec)
            written.append(io.write_sweep(out / "sweep_full.csv", sweep))
    return written


# ---------------------------------------------------------------------------
# invert-spatial


def _spatial_data(cfg, data_dir: Path):
    if cfg.time_domain:
        series = io.read_series(data_dir / "series_full.csv")
        return time_to_frequency(series, cfg.frequencies)
    return io.read_sweep(data_dir / "sweep_full.csv")


def _potential_sweeps(cfg, med, sweep: FrequencySweepData):
    rec = sweep.receivers
    up = np.empty((rec.count, 1, sweep.omegas.size), dtype=complex)
    us = np.empty_like(up)
    for k, w in enumerate(sweep.omegas):
        coeffs = decouple_circle(sweep, med, w, N=cfg.modal_order)
        a, b = modal_to_potentials(coeffs, rec.radius, rec.angles())
        up[:, 0, k], us[:, 0, k] = a, b
    return (FrequencySweepData(rec, sweep.omegas, up, {"family": "p"}),
            FrequencySweepData(rec, sweep.omegas, us, {"family": "s"}))


def run_invert_spatial(cfg: ExperimentConfig, data_dir: Path, out: Path, truth_dir: Path | None = None):
    med = cfg.medium()
    pulse = cfg.make_pulse()
    full = _spatial_data(cfg, data_dir)
    missing = [w for w in cfg.frequencies if not np.any(np.isclose(full.omegas, w, atol=1e-9))]
    if missing:
        raise ConfigurationError(f"frequencies: data has no samples at {missing}")
    sweeps = {"full": full}
    if any(not k.startswith("full") for k in cfg.kinds):
        sweeps["p"], sweeps["s"] = _potential_sweeps(cfg, med, full)
    template = GridField.centered(cfg.n, cfg.R0, 2, 1, cfg.R0)
    truths = {}
    if truth_dir is not None:
        for fam, name in (("full", "truth_f.csv"), ("p", "truth_fp.csv"), ("s", "truth_fs.csv")):
            path = Path(truth_dir) / name
            if path.exists():
                truths[fam] = io.read_grid(path)

    written, summary = [], []
    lw = LandweberConfig(L=cfg.L, epsilon=cfg.epsilon)
    for kind in cfg.kinds:
        fam = kind.split("-")[0]
        ops = [build_operator(kind, med, w, template, full.receivers) for w in cfg.frequencies]
        data = [operator_data(op, sweeps[fam], pulse) for op in ops]
        truth = truths.get(fam)
        if truth is not None and not truth.same_layout(ops[0].grid):
            raise ConfigurationError(f"truth grid for {fam} does not match grid.n = {cfg.n}")
        res = landweber_march(ops, data, lw, truth)
        written.append(io.write_grid(out / f"recon_{kind}.csv", res.field, {"epsilon": res.epsilon}))
        rows = [[r.k, r.omega, r.l, r.residual, np.nan if r.error is None else r.error] for r in res.trace]
        written.append(io.write_table(out / f"trace_{kind}.csv", ["k", "omega", "l", "residual", "error"], rows,
                                      {"kind": "trace", "warnings": " | ".join(res.warnings) or "none"}))
        err = relative_l2_error(res.field, truth) if truth is not None else np.nan
        summary.append([kind, res.epsilon, res.trace[-1].residual, err, int(res.monotone())])
    written.append(io.write_table(out / "summary.csv", ["kind", "epsilon", "final_residual", "error", "monotone"],
                                  summary, {"kind": "summary"}))
    return written, summary


# ---------------------------------------------------------------------------
# invert-temporal


def run_invert_temporal(cfg: ExperimentConfig, data_dir: Path, out: Path):
    med = cfg.medium()
    pulse = cfg.make_pulse()
    series = io.read_series(data_dir / "series.csv")
    sweep_w = paper_sweep()
    exact = np.reshape(pulse.spectrum(sweep_w), (sweep_w.size, -1))
    dense = np.arange(0.0, cfg.omega_max + 0.5 * cfg.omega_step, cfg.omega_step)
    t = series.times
    g_true = np.reshape(pulse(t), (t.size, -1))
    written = []
    for method in cfg.methods:
        table, _ = recover_temporal(series, med, sweep_w, t, method, cfg.x0)
        cols = ["omega", "used"] + [f"{p}{c}" for c in range(3) for p in ("est_re", "est_im")]
        cols += [f"{p}{c}" for c in range(3) for p in ("exact_re", "exact_im")]
        rows = []
        for k, w in enumerate(sweep_w):
            est = table.estimates[k]
            rows.append([w, len(table.points_used[k])]
                        + [v for c in range(3) for v in (est[c].real, est[c].imag)]
                        + [v for c in range(3) for v in (exact[k, c].real, exact[k, c].imag)])
        written.append(io.write_table(out / f"indicator_{method}.csv", cols, rows,
                                      {"kind": "indicator", "method": method, "rms_error": table.rms_error(exact)}))
        _, g_rec = recover_temporal(series, med, dense, t, method, cfg.x0)
        cols = ["t"] + [f"g{c}" for c in range(3)] + [f"exact{c}" for c in range(3)]
        written.append(io.write_table(out / f"signal_{method}.csv", cols, np.column_stack([t, g_rec, g_true]).tolist(),
                                      {"kind": "signal", "method": method}))
    return written


# ---------------------------------------------------------------------------
# selftest


def _suites():
    from .greens import greens_frequency, navier_residual, point_source_response_3d
    from .medium import hankel1, make_medium
    from .signals import paper_pulse, paper_vector_pulse
    from .spatial import adjoint_apply, apply
    from .temporal import indicator_I1, synthesize_point_data
    from .transforms import ModalCoefficients, modal_to_displacement

    med = make_medium(2, 1, 1)

    def hankel():
        x = np.linspace(0.5, 50, 40)
        n = 7
        w = hankel1(n + 1, x) * hankel1(n, x).conj() - hankel1(n, x) * hankel1(n + 1, x).conj()
        # the combination equals 2i (J_n Y_{n+1} - J_{n+1} Y_n) = -4i / (pi x)
        return float(np.max(np.abs(w.imag * np.pi * x / 4 + 1)))

    def navier():
        rng = np.random.default_rng(1)
        worst = 0.0
        for dim in (2, 3):
            for om in (1.0, 5.0, 10.0):
                x = rng.normal(size=dim)
                x *= rng.uniform(0.5, 3.0) / np.linalg.norm(x)
                worst = max(worst, float(navier_residual(med, om, dim, x).max()))
        return worst

    def time_frequency():
        g = paper_vector_pulse()
        x = np.array([1.0, 1.0, 0.0])
        t = np.arange(0, 12.0, 0.01)
        u = point_source_response_3d(med, g, x, t)
        w = np.array([2.0, 6.0])
        tw = np.full(t.size, 0.01)
        tw[[0, -1]] = 0.005
        U = (u * tw[:, None]).T @ np.exp(1j * np.outer(t, w))
        ref = np.stack([greens_frequency(med, om, 3, x) @ g.spectrum([om])[0] for om in w], axis=1)
        return float(np.linalg.norm(U - ref) / np.linalg.norm(ref))

    def modal():
        rec = ReceiverArray.circle(64, 2.0)
        orders = np.arange(-10, 11)
        c = ModalCoefficients(3.0, 2.0, orders, (orders == 4).astype(complex), np.zeros(21, complex), 1.5, 3.0)
        vals = modal_to_displacement(c, 2.0, rec.angles())
        back = decouple_circle(vals, med, 3.0, N=10, receivers=rec)
        return float(max(np.max(np.abs(back.u_p - c.u_p)), np.max(np.abs(back.u_s))))

    def adjoint():
        rec = ReceiverArray.circle(16, 2.0)
        grid = GridField.centered(12, 1.0, 2, 1, 1.0)
        rng = np.random.default_rng(2)
        worst = 0.0
        for kind in ("full-real", "p-imag"):
            op = build_operator(kind, med, 4.0, grid, rec)
            for _ in range(5):
                S = op.to_field(rng.normal(size=op.shape[1]))
                r = rng.normal(size=op.shape[0])
                lhs = apply(op, S) @ r
                rhs = S.cell_weight * np.sum(S.values * adjoint_apply(op, r).values)
                worst = max(worst, abs(lhs - rhs) / max(abs(lhs), 1e-300))
        return float(worst)

    def indicator():
        g = paper_vector_pulse()
        w = paper_sweep()
        data = synthesize_point_data(med, g, w, [[1.0, 1.0, 0.0]])
        est = indicator_I1(data, med).estimates
        ref = g.spectrum(w)
        return float(np.max(np.abs(est - ref)) / np.max(np.abs(ref)))

    def transform_round_trip():
        g = paper_pulse()
        t = np.arange(0, 20.0 + 1e-9, 0.01)
        w = np.linspace(0, 25, 200)
        s = TimeSeriesData(ReceiverArray([[1.0, 0.0]]), 0.0, 0.01, g(t)[None, None, :])
        back = frequency_to_time(w, time_to_frequency(s, w).values[0, 0], t)
        return float(np.linalg.norm(back - g(t)) / np.linalg.norm(g(t)))

    return [
        ("medium.hankel_wronskian", hankel, 1e-10),
        ("greens.navier_residual", navier, 1e-4),
        ("greens.time_frequency", time_frequency, 1e-3),
        ("transforms.modal_round_trip", modal, 1e-8),
        ("transforms.fourier_round_trip", transform_round_trip, 1e-2),
        ("spatial.adjoint_identity", adjoint, 1e-12),
        ("temporal.indicator_exactness", indicator, 1e-10),
    ]


def run_selftest(breach=(), stream=None):
    """Run every suite; ``breach`` names suites whose tolerance is forced to zero."""
    stream = stream or sys.stdout
    rows, ok = [], True
    for name, fn, tol in _suites():
        if name in breach:
            tol = 0.0
        start = time.perf_counter()
        try:
            value = fn()
            passed = bool(value <= tol) if tol > 0 else bool(value < tol)
        except Exception as exc:  # report, keep going
            value, passed = float("nan"), False
            print(f"{name}: raised {exc!r}", file=stream)
        elapsed = time.perf_counter() - start
        ok &= passed
        rows.append((name, passed, value, tol, elapsed))
        print(f"{'PASS' if passed else 'FAIL'}  {name:32s} value={value:.3e} tol={tol:.1e} time={elapsed:.2f}s", file=stream)
    return ok, rows


# ---------------------------------------------------------------------------
# entry point


def build_parser():
    p = argparse.ArgumentParser(prog="elastoinv", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("forward", "synthesize data files"),
        ("invert-spatial", "Landweber reconstruction of the spatial factor"),
        ("invert-temporal", "indicator recovery of the temporal factor"),
    ):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("--config", help="experiment configuration (INI)")
        s.add_argument("--out", help="output directory")
        s.add_argument("--seed", type=int, help="noise seed, overrides the config")
        if name != "forward":
            s.add_argument("--data", help="directory with input data files (default: the output directory)")
        if name == "invert-spatial":
            s.add_argument("--truth", help="directory with truth grids for error reporting")
    s = sub.add_parser("selftest", help="run the built-in invariant suites")
    s.add_argument("--breach", action="append", default=[], help="force the named suite to fail")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "selftest":
            ok, _ = run_selftest(set(args.breach))
            return 0 if ok else EXIT_NUMERIC
        cfg = _config(args)
        out = _out_dir(args, cfg)
        if args.command == "forward":
            files = run_forward(cfg, out)
        elif args.command == "invert-spatial":
            data_dir = Path(args.data) if args.data else out
            files, summary = run_invert_spatial(cfg, data_dir, out, Path(args.truth) if args.truth else None)
            for kind, eps, res, err, mono in summary:
                print(f"{kind}: epsilon={eps:.4g} residual={res:.4g} error={err:.4g} monotone={bool(mono)}")
        else:
            data_dir = Path(args.data) if args.data else out
            files = run_invert_temporal(cfg, data_dir, out)
        io.write_manifest(out, {"command": args.command, **cfg.echo()}, files)
        return 0
    except (ConfigurationError, ParameterError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ElastoInvError, ArithmeticError, np.linalg.LinAlgError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
