"""Command-line front end.

    bellsynth <subcommand> --config <path|cw_fig3|pulsed_fig4> --out <dir> [--seed N]

Each subcommand writes CSV files into ``--out`` and prints
``OK <subcommand> <n_outputs>``. Exit status is 2 for configuration errors
and 3 for physics/domain errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import concentrator as conc
from . import expsim, qstate
from .biphoton import biphoton_amplitude, fitted_grid
from .config import RunConfig
from .csvio import write_csv, write_summary
from .errors import BellSynthError, ConfigError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PHYSICS = 3


def _delay_sweep(cfg: RunConfig, out: Path):
    setup = cfg.setup()
    pi = biphoton_amplitude(setup)
    taus = cfg.tau_grid("sweep")
    th1, th2 = cfg["sweep.theta1_deg"], cfg["sweep.theta2_deg"]
    phi = setup.phase_phi
    terms = conc.delay_terms(pi, taus)
    curve = conc.curve_from_terms(terms, th1, th2, phi)
    files = [write_csv(out / "curve.csv", ["abscissa", "rate"], curve.rows())]

    shape = cfg["sweep.shape"]
    if shape == "auto":
        centre = float(np.interp(0.0, curve.abscissa, curve.rate))
        shape = "peak" if centre >= conc._edge_baseline(curve) else "dip"
    if shape not in ("peak", "dip"):
        raise ConfigError("sweep.shape must be auto, peak or dip", line=cfg.line("sweep.shape"), key="sweep.shape")
    summary = {
        "shape": shape,
        "theta1_deg": th1,
        "theta2_deg": th2,
        "phi_rad": phi,
        "delay_spread_fs": pi.delay_spread_fs,
        "visibility": conc.visibility(curve),
    }
    if shape == "peak":
        summary["base_width_fs"] = conc.triangle_base_width(curve)
        summary["fwhm_fs"] = conc.peak_fwhm(curve)
    else:
        summary["fwhm_fs"] = conc.dip_fwhm(curve)

    scan = cfg["sweep.phi_scan_rad"]
    if scan:
        rows = []
        for p in scan:
            rows.append((p, conc.visibility(conc.curve_from_terms(terms, th1, th2, p))))
        files.append(write_csv(out / "phi_scan.csv", ["phi_rad", "visibility"], rows))
    files.append(write_summary(out / "summary.csv", summary))
    return files


def _analyzer_sweep(cfg: RunConfig, out: Path):
    setup = cfg.setup()
    pi = biphoton_amplitude(setup)
    tau = cfg["analyzer.tau_fs"]
    curve = conc.sweep_analyzer(pi, tau, cfg["analyzer.theta1_deg"], cfg.theta2_grid(), setup.phase_phi)
    summary = {
        "tau_fs": tau,
        "theta1_deg": cfg["analyzer.theta1_deg"],
        "phi_rad": setup.phase_phi,
        "epsilon": conc.werner_epsilon(pi, tau),
        "visibility": conc.visibility(curve),
    }
    return [
        write_csv(out / "curve.csv", ["abscissa", "rate"], curve.rows()),
        write_summary(out / "summary.csv", summary),
    ]


def universality_rows(cfg: RunConfig):
    """tau = 0 analyzer-sweep visibility over pump bandwidth x crystal length x filter FWHM."""
    base = cfg.setup()
    theta2 = np.arange(0.0, 180.0 + 1e-9, 5.0)
    rows = []
    for bw in cfg["universality.pump_bandwidths_nm"]:
        for length in cfg["universality.lengths_mm"]:
            for fw in cfg["universality.filter_fwhms_nm"]:
                setup = base.with_params(bandwidth_nm=bw, length_mm=length, filter_fwhm_nm=fw)
                pi = biphoton_amplitude(setup, fitted_grid(setup))
                curve = conc.sweep_analyzer(pi, 0.0, 45.0, theta2, base.phase_phi)
                rows.append((bw, length, fw, conc.visibility(curve)))
    return rows


def _universality(cfg: RunConfig, out: Path):
    rows = universality_rows(cfg)
    vis = np.array([r[3] for r in rows])
    summary = {
        "n_configs": len(rows),
        "min_visibility": float(vis.min()),
        "max_deviation": float(np.max(np.abs(vis - 1.0))),
    }
    return [
        write_csv(
            out / "universality.csv",
            ["pump_bandwidth_nm", "length_mm", "filter_fwhm_nm", "visibility"],
            rows,
        ),
        write_summary(out / "summary.csv", summary),
    ]


def _werner_trajectory(cfg: RunConfig, out: Path):
    setup = cfg.setup()
    pi = biphoton_amplitude(setup)
    rows = []
    for tau in cfg.tau_grid("werner"):
        rho = conc.output_state(pi, tau, setup.phase_phi)
        m = qstate.metrics(rho)
        rows.append(
            (tau, conc.werner_epsilon(pi, tau), m.concurrence, m.normalized_entropy, m.entanglement_of_formation)
        )
    return [write_csv(out / "trajectory.csv", ["tau_fs", "epsilon", "concurrence", "S", "E"], rows)]


def _events(cfg: RunConfig, out: Path):
    setup = cfg.setup()
    det = cfg.detection()
    pi = biphoton_amplitude(setup)
    tau = cfg["events.tau_fs"]
    rho = conc.output_state(pi, tau, setup.phase_phi)
    setting = conc.MeasurementSetting(tau, cfg["events.theta1_deg"], cfg["events.theta2_deg"], setup.phase_phi)
    stream = expsim.simulate_events(rho, setting, det)
    hist, summary = expsim.coincidence_histogram(stream, det)
    s = summary.as_dict()
    s["expected_true"] = expsim.expected_true_coincidences(rho, setting, det)
    s["expected_accidentals"] = expsim.expected_accidentals(rho, setting, det)
    return [
        write_csv(out / "events.csv", ["detector", "time_ns", "origin"], stream.rows()),
        write_csv(out / "histogram.csv", ["bin_center_ns", "count"], hist.rows()),
        write_summary(out / "summary.csv", s),
    ]


def _tomography(cfg: RunConfig, out: Path):
    setup = cfg.setup()
    pi = biphoton_amplitude(setup)
    tau = cfg["tomography.tau_fs"]
    rho = conc.output_state(pi, tau, setup.phase_phi)
    counts = expsim.tomography_counts(rho, cfg["tomography.shots"], cfg["tomography.seed"])
    est = expsim.reconstruct_state(counts)
    summary = {
        "tau_fs": tau,
        "shots_per_setting": counts.total_per_setting,
        "fidelity": qstate.fidelity(rho, est),
        "concurrence_true": qstate.concurrence(rho),
        "concurrence_reconstructed": qstate.concurrence(est),
        "S_reconstructed": qstate.normalized_entropy(est),
        "E_reconstructed": qstate.entanglement_of_formation(est),
    }
    return [
        write_csv(out / "counts.csv", ["basis1", "basis2", "count", "total"], counts.rows()),
        write_csv(out / "state.csv", ["row", "col", "re", "im"], qstate.to_rows(est)),
        write_summary(out / "summary.csv", summary),
    ]


COMMANDS = {
    "delay-sweep": _delay_sweep,
    "analyzer-sweep": _analyzer_sweep,
    "universality": _universality,
    "werner-trajectory": _werner_trajectory,
    "events": _events,
    "tomography": _tomography,
}


def build_parser():
    p = argparse.ArgumentParser(prog="bellsynth", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="config file or bundled name")
        sp.add_argument("--out", required=True, type=Path, help="output directory")
        sp.add_argument("--seed", type=int, default=None, help="override detection/tomography seeds")
    return p


def run(command, config_path, output_dir, seed=None):
    """Run one subcommand; returns the list of written files."""
    cfg = RunConfig.load(config_path)
    if seed is not None:
        cfg.override("detection.seed", seed)
        cfg.override("tomography.seed", seed)
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return COMMANDS[command](cfg, out)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        files = run(args.command, args.config, args.out, args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BellSynthError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    print(f"OK {args.command} {len(files)}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
