"""Command-line entry points: simulate, plan, analyze, sweep.

``simulate`` runs the full pipeline (combs -> transfer function -> pulse
propagation -> Monte Carlo detection) and writes an event file, per-mode
histograms and traces, the efficiency report, and a manifest with the
config hash and seed so a run can be regenerated exactly.  ``analyze``
applies the same report construction to any conforming event file.
``plan`` evaluates platform capacity limits, and ``sweep`` tabulates
numeric vs analytic first-echo efficiency over a (depth, finesse,
background) grid for calibration.
"""

from __future__ import annotations

import argparse
import datetime
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import analysis, detection, planner, propagation, spectral
from .config import TOOL_VERSION, RunConfig, default_config, load_config
from .detection import DetectionRecord
from .propagation import PulseSpec
from .spectral import CombSpec, FrequencyGrid, ToothShape


def _load(args: argparse.Namespace) -> RunConfig:
    cfg = load_config(args.config) if args.config else default_config()
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if getattr(args, "trials", None) is not None:
        cfg = replace(cfg, source=replace(cfg.source, pulses_per_mode=args.trials))
    if getattr(args, "mu", None) is not None:
        cfg = replace(cfg, source=replace(cfg.source, mean_photon_number=args.mu))
    return cfg


def _check(cfg: RunConfig, force: bool) -> None:
    problems = cfg.validate()
    if problems:
        for p in problems:
            print(f"config violation: {p}", file=sys.stderr)
        if not force:
            raise SystemExit(2)
        print("continuing despite violations (--force)", file=sys.stderr)


def _outdir(args: argparse.Namespace, names: list[str]) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if not args.overwrite:
        existing = [n for n in names if (out / n).exists()]
        if existing:
            print(
                f"refusing to overwrite {', '.join(existing)} in {out} "
                "(pass --overwrite)",
                file=sys.stderr,
            )
            raise SystemExit(1)
    return out


def _write_manifest(path: Path, cfg: RunConfig, outputs: list[str]) -> None:
    manifest = {
        "tool_version": TOOL_VERSION,
        "config_hash": cfg.config_hash(),
        "seed": cfg.seed,
        "created_utc": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "outputs": outputs,
        "config": cfg.to_dict(),
    }
    path.write_text(json.dumps(manifest, indent=2) + "\n")


def build_medium(cfg: RunConfig) -> spectral.TransferFunction:
    profiles = [spectral.build_comb(c, cfg.grid) for c in cfg.combs]
    return spectral.to_transfer_function(spectral.compose(profiles))


def run_simulation(cfg: RunConfig) -> tuple[list[DetectionRecord], list[propagation.TemporalTrace]]:
    """Propagate one pulse per mode and Monte Carlo all trials.

    Trials for mode k occupy the id block [(k-1)*N_in, k*N_in) in the
    merged record list.
    """
    tf = build_medium(cfg)
    window = cfg.observation_window_s
    records: list[DetectionRecord] = []
    traces = []
    source_on = cfg.source.mean_photon_number > 0
    mode_seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.scheme.n_frequency_modes)
    for mode in range(1, cfg.scheme.n_frequency_modes + 1):
        trace = propagation.propagate(cfg.pulse_for_mode(mode), tf)
        traces.append(trace)
        if not source_on:  # mu = 0: no pulses, detector never gated
            continue
        records.extend(
            detection.simulate_trials(
                cfg.source,
                cfg.detector,
                trace,
                window,
                seed=mode_seeds[mode - 1],
                trial_offset=(mode - 1) * cfg.source.pulses_per_mode,
            )
        )
    return records, traces


def build_report(records: list[DetectionRecord], cfg: RunConfig) -> analysis.EfficiencyReport:
    windows = analysis.WindowSet.from_scheme(cfg.scheme)
    return analysis.summarize(
        records,
        cfg.scheme,
        windows,
        n_in=cfg.source.pulses_per_mode,
        mu=cfg.source.mean_photon_number,
        eta_c=cfg.detector.coupling_efficiency,
        eta_d=cfg.detector.detection_efficiency,
        dark_rate_hz=cfg.detector.dark_rate_hz,
    )


def _report_table(report: analysis.EfficiencyReport) -> str:
    lines = ["mode  window_ns        eta_echo          eta_error"]
    for m in report.modes:
        lines.append(
            f"{m.mode:>4}  [{m.window_start_ns:6.0f},{m.window_stop_ns:6.0f})  "
            f"{100 * m.eta_echo:5.2f}% +- {100 * m.eta_echo_sigma:4.2f}%  "
            f"{100 * m.eta_error:5.2f}% +- {100 * m.eta_error_sigma:4.2f}%"
        )
    if report.dark_floor_eta_error is not None:
        lines.append(f"dark-count floor on eta_error: {100 * report.dark_floor_eta_error:.2f}%")
    return "\n".join(lines)


def cmd_simulate(args: argparse.Namespace) -> int:
    cfg = _load(args)
    _check(cfg, args.force)
    n_modes = cfg.scheme.n_frequency_modes
    names = (
        ["events.txt", "report.json", "manifest.json", "absorption_profile.txt"]
        + [f"histogram_mode{k}.csv" for k in range(1, n_modes + 1)]
        + [f"trace_mode{k}.txt" for k in range(1, n_modes + 1)]
    )
    out = _outdir(args, names)

    records, traces = run_simulation(cfg)
    detection.write_events(records, out / "events.txt")

    profiles = [spectral.build_comb(c, cfg.grid) for c in cfg.combs]
    spectral.write_profile(spectral.compose(profiles), out / "absorption_profile.txt")

    windows = analysis.WindowSet.from_scheme(cfg.scheme)
    groups = analysis.split_by_mode(records, cfg.source.pulses_per_mode, n_modes)
    t_max = cfg.observation_window_s[1]
    for mode in range(1, n_modes + 1):
        edges, counts = detection.histogram(
            groups[mode], cfg.detector.bin_width_s, t_max_s=t_max
        )
        analysis.write_histogram_csv(edges, counts, out / f"histogram_mode{mode}.csv")
        propagation.write_trace(traces[mode - 1], out / f"trace_mode{mode}.txt")

    report = build_report(records, cfg)
    analysis.write_report(report, out / "report.json")
    _write_manifest(out / "manifest.json", cfg, names)
    print(_report_table(report))
    print(f"wrote {len(names)} files to {out}")
    return 0


def cmd_plan(args: argparse.Namespace) -> int:
    cfg = _load(args)
    report = planner.check_plan(
        cfg.scheme.n_frequency_modes,
        cfg.scheme.n_spatial_modes,
        cfg.scheme.temporal_mode_s,
        cfg.scheme.mapped_mode_s,
        cfg.limits,
    )
    print(report.to_text())
    if args.out:
        out = _outdir(args, ["plan.json"])
        planner.write_plan(report, out / "plan.json")
        print(f"wrote {out / 'plan.json'}")
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    cfg = _load(args)
    _check(cfg, args.force)
    try:
        records = detection.read_events(args.events)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    n_modes = cfg.scheme.n_frequency_modes
    names = ["report.json"] + [f"histogram_mode{k}.csv" for k in range(1, n_modes + 1)]
    out = _outdir(args, names)

    groups = analysis.split_by_mode(records, cfg.source.pulses_per_mode, n_modes)
    t_max = cfg.observation_window_s[1]
    for mode in range(1, n_modes + 1):
        edges, counts = detection.histogram(
            groups[mode], cfg.detector.bin_width_s, t_max_s=t_max
        )
        analysis.write_histogram_csv(edges, counts, out / f"histogram_mode{mode}.csv")

    report = build_report(records, cfg)
    analysis.write_report(report, out / "report.json")
    print(_report_table(report))
    return 0


def _parse_axis(text: str) -> np.ndarray:
    """Sweep axis syntax: a single value '2.5' or a range 'start:stop:steps'."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError("range must be start:stop:steps")
        start, stop, steps = float(parts[0]), float(parts[1]), int(parts[2])
        if steps < 1:
            raise argparse.ArgumentTypeError("steps must be >= 1")
        return np.linspace(start, stop, steps)
    return np.array([float(text)])


def sweep_grid(
    depths: np.ndarray,
    finesses: np.ndarray,
    backgrounds: np.ndarray,
    comb_spacing_hz: float,
    pulse_fwhm_hz: float | None = None,
) -> list[tuple[float, float, float, float, float]]:
    """Rows (d, F, d0, eta_numeric, eta_analytic) over the cartesian grid.

    Uses an isolated centered comb wide enough that the pulse only sees
    comb structure; the first-echo window energy is the numeric efficiency.
    """
    if pulse_fwhm_hz is None:
        pulse_fwhm_hz = 4.0 * comb_spacing_hz
    fin_max = float(np.max(finesses))
    df = comb_spacing_hz / fin_max / 12.0
    n = 1 << 13
    while n * df < 14 * pulse_fwhm_hz:
        n <<= 1
    grid = FrequencyGrid(resolution_hz=df, sample_count=n)
    pulse = PulseSpec(spectral_fwhm_hz=pulse_fwhm_hz)
    bandwidth = 10 * pulse_fwhm_hz
    rows = []
    for d in depths:
        for fin in finesses:
            for d0 in backgrounds:
                comb = CombSpec(
                    center_offset_hz=0.0,
                    comb_spacing_hz=comb_spacing_hz,
                    finesse=float(fin),
                    peak_depth=float(d),
                    background_depth=float(d0),
                    comb_bandwidth_hz=bandwidth,
                    tooth_shape=ToothShape.GAUSSIAN,
                )
                tf = spectral.to_transfer_function(spectral.build_comb(comb, grid))
                trace = propagation.propagate(pulse, tf)
                summary = propagation.extract_echoes(trace, comb_spacing_hz, orders=1)
                eta_num = summary.energies[1]
                eta_ana = propagation.analytic_echo_efficiency(float(d), float(fin), float(d0))
                rows.append((float(d), float(fin), float(d0), float(eta_num), float(eta_ana)))
    return rows


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _load(args)
    spacing = args.spacing if args.spacing else cfg.combs[0].comb_spacing_hz
    rows = sweep_grid(
        args.depth,
        args.finesse,
        args.background,
        comb_spacing_hz=spacing,
        pulse_fwhm_hz=args.pulse_fwhm,
    )
    out = _outdir(args, ["sweep.csv"])
    lines = ["d,finesse,d0,eta_numeric,eta_analytic"]
    lines.extend(
        f"{d:.6g},{fin:.6g},{d0:.6g},{num:.8g},{ana:.8g}" for d, fin, d0, num, ana in rows
    )
    (out / "sweep.csv").write_text("\n".join(lines) + "\n")
    print(f"wrote {len(rows)} rows to {out / 'sweep.csv'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="afcmap",
        description="Comb-based frequency-to-time mode mapping simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", type=str, default=None, help="TOML config file")
        p.add_argument("--seed", type=int, default=None, help="override the RNG seed")
        p.add_argument("--out", type=str, default=None, help="output directory")
        p.add_argument("--overwrite", action="store_true", help="replace existing outputs")
        p.add_argument("--force", action="store_true", help="run despite config violations")
        p.add_argument("--trials", type=int, default=None, help="override pulses per mode")
        p.add_argument("--mu", type=float, default=None, help="override mean photon number")

    p_sim = sub.add_parser("simulate", help="run the full simulation pipeline")
    common(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_plan = sub.add_parser("plan", help="check capacity and feasibility limits")
    common(p_plan)
    p_plan.set_defaults(func=cmd_plan)

    p_ana = sub.add_parser("analyze", help="compute the efficiency report from an event file")
    p_ana.add_argument("events", type=str, help="events file (# events v1)")
    common(p_ana)
    p_ana.set_defaults(func=cmd_analyze)

    p_sweep = sub.add_parser("sweep", help="tabulate numeric vs analytic echo efficiency")
    common(p_sweep)
    p_sweep.add_argument("--depth", type=_parse_axis, default=_parse_axis("1:4:5"),
                         help="tooth depth axis (a or a:b:n)")
    p_sweep.add_argument("--finesse", type=_parse_axis, default=_parse_axis("2:6:5"),
                         help="finesse axis")
    p_sweep.add_argument("--background", type=_parse_axis, default=_parse_axis("0:0.5:5"),
                         help="background depth axis")
    p_sweep.add_argument("--spacing", type=float, default=None, help="comb spacing in Hz")
    p_sweep.add_argument("--pulse-fwhm", type=float, default=None, help="probe pulse FWHM in Hz")
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.func in (cmd_simulate, cmd_analyze, cmd_sweep) and not args.out:
        print("--out DIR is required for this command", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
