"""Calibrate comb tooth depths against target echo efficiencies.

For each frequency mode, root-finds the peak depth whose propagated
first-window energy equals the target efficiency, holding finesse and
background fixed.  Prints the calibrated [[combs]] blocks ready to paste
into a config file, and cross-checks each point against the analytic
Gaussian-tooth formula.

Usage:
    python scripts/calibrate_combs.py [--targets 0.21 0.14 0.11] [--finesse 3.0]
"""

from __future__ import annotations

import argparse
from dataclasses import replace

from scipy.optimize import brentq

from afcmap import analysis, propagation, spectral
from afcmap.config import default_config


def window_energy_for_depth(cfg, mode: int, depth: float) -> float:
    comb = cfg.combs[mode - 1]
    spec = spectral.CombSpec(
        center_offset_hz=comb.center_offset_hz,
        comb_spacing_hz=comb.comb_spacing_hz,
        finesse=comb.finesse,
        peak_depth=depth,
        background_depth=comb.background_depth,
        tooth_shape=comb.tooth_shape,
        comb_bandwidth_hz=comb.comb_bandwidth_hz,
    )
    tf = spectral.to_transfer_function(spectral.build_comb(spec, cfg.grid))
    trace = propagation.propagate(cfg.pulse_for_mode(mode), tf)
    windows = analysis.WindowSet.from_scheme(cfg.scheme)
    t = trace.times()
    lo = windows.starts_s[mode - 1]
    hi = windows.stops_s[mode - 1]
    mask = (t >= lo) & (t < hi)
    return float(trace.intensity[mask].sum() * trace.time_step_s)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--targets", type=float, nargs="+", default=[0.21, 0.14, 0.11])
    parser.add_argument("--finesse", type=float, default=None, help="override comb finesse")
    args = parser.parse_args()

    cfg = default_config()
    if len(args.targets) != cfg.scheme.n_frequency_modes:
        raise SystemExit("need one target per frequency mode")

    print("calibrating tooth depths (isolated combs, first window energy):")
    for mode, target in enumerate(args.targets, start=1):
        comb = cfg.combs[mode - 1]
        finesse = args.finesse if args.finesse is not None else comb.finesse
        if args.finesse is not None:
            comb = replace(comb, finesse=finesse)
            combs = list(cfg.combs)
            combs[mode - 1] = comb
            cfg = replace(cfg, combs=tuple(combs))
        depth = brentq(
            lambda d: window_energy_for_depth(cfg, mode, d) - target, 0.05, 8.0, xtol=1e-7
        )
        ana = propagation.analytic_echo_efficiency(depth, finesse, comb.background_depth)
        print(f"\n[[combs]]  # mode {mode}: target {target:.4f}, analytic {ana:.4f}")
        print(f"center_offset_hz = {comb.center_offset_hz:g}")
        print(f"finesse = {finesse:g}")
        print(f"peak_depth = {depth:.6f}")
        print(f"background_depth = {comb.background_depth:g}")
        print(f'tooth_shape = "{comb.tooth_shape.value}"')
        print(f"comb_bandwidth_hz = {comb.comb_bandwidth_hz:g}")


if __name__ == "__main__":
    main()
