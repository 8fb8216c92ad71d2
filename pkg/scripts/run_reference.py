"""Run the bundled three-mode reference scenario end to end.

Propagates one pulse per frequency mode through the composite comb medium,
Monte Carlos the full trial count, and prints the per-mode efficiency
table next to the deterministic window energies so statistical and
systematic parts can be compared at a glance.

Usage:
    python scripts/run_reference.py [--seed N] [--trials N] [--out DIR]
"""

from __future__ import annotations

import argparse
from dataclasses import replace

from afcmap import analysis, propagation
from afcmap.cli import build_medium, build_report, run_simulation
from afcmap.config import default_config


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--trials", type=int, default=None)
    parser.add_argument("--out", type=str, default=None, help="also write CLI-style outputs")
    args = parser.parse_args()

    cfg = default_config(seed=args.seed)
    if args.trials:
        cfg = replace(cfg, source=replace(cfg.source, pulses_per_mode=args.trials))

    tf = build_medium(cfg)
    windows = analysis.WindowSet.from_scheme(cfg.scheme)
    print("deterministic window energies (pulse energy fractions):")
    for mode in range(1, cfg.scheme.n_frequency_modes + 1):
        trace = propagation.propagate(cfg.pulse_for_mode(mode), tf)
        t = trace.times()
        energies = [
            float(trace.intensity[(t >= s) & (t < e)].sum() * trace.time_step_s)
            for s, e in zip(windows.starts_s, windows.stops_s)
        ]
        peak_ns = propagation.echo_peak_time(trace, cfg.scheme.comb_spacings_hz[mode - 1]) * 1e9
        row = "  ".join(f"{x:.4f}" for x in energies)
        print(f"  mode {mode}: [{row}]  first echo peak {peak_ns:7.1f} ns")

    records, _ = run_simulation(cfg)
    report = build_report(records, cfg)
    print(f"\nMonte Carlo ({cfg.source.pulses_per_mode} pulses/mode, seed {cfg.seed}):")
    for m in report.modes:
        print(
            f"  mode {m.mode}: eta_echo = {100 * m.eta_echo:5.2f}% +- {100 * m.eta_echo_sigma:.2f}%   "
            f"eta_error = {100 * m.eta_error:.2f}% +- {100 * m.eta_error_sigma:.2f}%"
        )
    if report.dark_floor_eta_error is not None:
        print(f"  dark-count floor on eta_error: {100 * report.dark_floor_eta_error:.2f}%")

    if args.out:
        from afcmap.cli import main as cli_main

        cli_main(["simulate", "--out", args.out, "--seed", str(cfg.seed), "--overwrite"])


if __name__ == "__main__":
    main()
