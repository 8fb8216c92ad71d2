"""Run configuration: TOML ingestion, defaults, and cross-validation.

A run is described by one structured config file with sections [grid],
[scheme], [source], [detector], [limits] and one [[combs]] block per
frequency mode.  The built-in defaults describe the bundled three-mode
reference scenario: combs spaced 100 MHz apart with window-centered comb
spacings, a 5 MHz weak coherent source, and fiber-coupled single-photon
counting; tooth depths are calibrated so the simulated echo efficiencies
land at 21 / 14 / 11 percent.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .detection import DetectorSpec, SourceSpec
from .mapping import SchemeConfig, centered_comb_spacing, validate as validate_scheme
from .planner import PlatformLimits
from .propagation import CONTAINMENT_AMPLITUDE, PulseSpec
from .spectral import LN2, SAMPLES_PER_TOOTH, CombSpec, FrequencyGrid, ToothShape

TOOL_VERSION = "0.1.0"

# Tooth depths calibrated so the propagated window energies match the
# reference echo efficiencies (see scripts/calibrate_combs.py).
DEFAULT_COMB_DEPTHS = (3.693831, 2.395505, 1.968457)
DEFAULT_FINESSE = 3.0
DEFAULT_COMB_BANDWIDTH_HZ = 40e6
DEFAULT_MODE_OFFSETS_HZ = (-100e6, 0.0, 100e6)


@dataclass(frozen=True)
class RunConfig:
    grid: FrequencyGrid
    combs: tuple[CombSpec, ...]
    scheme: SchemeConfig
    source: SourceSpec
    detector: DetectorSpec
    limits: PlatformLimits
    seed: int = 0

    @property
    def observation_window_s(self) -> tuple[float, float]:
        """Per-trial gated span: window 0 through window N_F on channel 0."""
        return (0.0, (self.scheme.n_frequency_modes + 1) * self.scheme.mapped_mode_s)

    def pulse_for_mode(self, mode: int) -> PulseSpec:
        base = self.source.pulse
        return PulseSpec(
            spectral_fwhm_hz=base.spectral_fwhm_hz,
            carrier_offset_hz=self.scheme.mode_offsets_hz[mode - 1],
            emission_time_s=base.emission_time_s,
            shape=base.shape,
        )

    def to_dict(self) -> dict:
        return {
            "grid": {
                "resolution_hz": self.grid.resolution_hz,
                "sample_count": self.grid.sample_count,
            },
            "combs": [
                {
                    "center_offset_hz": c.center_offset_hz,
                    "comb_spacing_hz": c.comb_spacing_hz,
                    "finesse": c.finesse,
                    "peak_depth": c.peak_depth,
                    "background_depth": c.background_depth,
                    "tooth_shape": c.tooth_shape.value,
                    "comb_bandwidth_hz": c.comb_bandwidth_hz,
                }
                for c in self.combs
            ],
            "scheme": {
                "n_frequency_modes": self.scheme.n_frequency_modes,
                "n_spatial_modes": self.scheme.n_spatial_modes,
                "temporal_mode_ns": self.scheme.temporal_mode_s * 1e9,
                "mapped_mode_ns": self.scheme.mapped_mode_s * 1e9,
            },
            "source": {
                "mean_photon_number": self.source.mean_photon_number,
                "pulses_per_mode": self.source.pulses_per_mode,
                "spectral_fwhm_hz": self.source.pulse.spectral_fwhm_hz,
                "emission_time_ns": self.source.pulse.emission_time_s * 1e9,
            },
            "detector": {
                "coupling_efficiency": self.detector.coupling_efficiency,
                "detection_efficiency": self.detector.detection_efficiency,
                "dark_rate_hz": self.detector.dark_rate_hz,
                "bin_width_ns": self.detector.bin_width_s * 1e9,
                "timing_jitter_ns": self.detector.timing_jitter_s * 1e9,
            },
            "limits": {
                "modulation_range_hz": self.limits.modulation_range_hz,
                "inhomogeneous_broadening_hz": self.limits.inhomogeneous_broadening_hz,
                "min_mode_spacing_hz": self.limits.min_mode_spacing_hz,
                "min_stable_comb_spacing_hz": self.limits.min_stable_comb_spacing_hz,
                "per_afc_creation_time_s": self.limits.per_afc_creation_time_s,
                "per_mode_modulation_time_s": self.limits.per_mode_modulation_time_s,
                "hyperfine_relaxation_time_s": self.limits.hyperfine_relaxation_time_s,
            },
            "seed": self.seed,
        }

    def config_hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()

    def validate(self) -> list[str]:
        """Cross-checks between sections; empty list means the run is sound."""
        problems = [
            f"scheme: {v.name} violated (slack {v.slack:.6g}): {v.detail}"
            for v in validate_scheme(self.scheme)
        ]
        if len(self.combs) != self.scheme.n_frequency_modes:
            problems.append(
                f"combs: expected {self.scheme.n_frequency_modes} comb blocks, "
                f"got {len(self.combs)}"
            )
            return problems

        for k, comb in enumerate(self.combs, start=1):
            if abs(comb.center_offset_hz - self.scheme.mode_offsets_hz[k - 1]) > 1e-6:
                problems.append(
                    f"comb {k}: center offset disagrees with the scheme mode offset"
                )
            rule = centered_comb_spacing(k, self.scheme.mapped_mode_s)
            if abs(comb.comb_spacing_hz - rule) > 0.01 * rule:
                problems.append(
                    f"comb {k}: spacing {comb.comb_spacing_hz:.6g} Hz is more than 1% "
                    f"away from the window-centering rule ({rule:.6g} Hz); echoes will "
                    "miss their window centers"
                )
            if self.grid.resolution_hz > comb.tooth_fwhm_hz / SAMPLES_PER_TOOTH:
                problems.append(
                    f"comb {k}: grid resolution does not resolve the tooth "
                    f"(need df <= {comb.tooth_fwhm_hz / SAMPLES_PER_TOOTH:.6g} Hz)"
                )

        slowest = min(c.comb_spacing_hz for c in self.combs)
        if self.grid.duration_s < 4.0 / slowest:
            problems.append(
                "grid: time window must cover at least four echo delays of the "
                f"slowest comb (need >= {4.0 / slowest:.6g} s, got {self.grid.duration_s:.6g} s)"
            )

        containment = self.source.pulse.spectral_fwhm_hz * float(
            np.sqrt(np.log(1.0 / CONTAINMENT_AMPLITUDE) / (2 * LN2))
        )
        half_span = self.grid.span_hz / 2
        for k, offset in enumerate(self.scheme.mode_offsets_hz, start=1):
            if abs(offset) + containment >= half_span:
                problems.append(f"mode {k}: pulse spectrum is clipped by the grid span")
            if containment > self.combs[k - 1].comb_bandwidth_hz / 2:
                problems.append(
                    f"mode {k}: pulse spectrum is wider than the comb bandwidth"
                )

        spacing_gap = min(
            abs(a - b)
            for i, a in enumerate(self.scheme.mode_offsets_hz)
            for b in self.scheme.mode_offsets_hz[i + 1 :]
        ) if self.scheme.n_frequency_modes > 1 else float("inf")
        if self.source.pulse.spectral_fwhm_hz >= spacing_gap:
            problems.append("source: pulse FWHM must stay below the mode spacing")

        stop = self.observation_window_s[1]
        if stop > self.grid.duration_s:
            problems.append("grid: observation window extends past the trace duration")
        return problems


def default_config(seed: int = 0) -> RunConfig:
    scheme = SchemeConfig.with_centered_echoes(
        n_frequency_modes=3,
        n_spatial_modes=3,
        temporal_mode_s=435e-9,
        mapped_mode_s=435e-9,
        mode_offsets_hz=DEFAULT_MODE_OFFSETS_HZ,
    )
    combs = tuple(
        CombSpec(
            center_offset_hz=scheme.mode_offsets_hz[k],
            comb_spacing_hz=scheme.comb_spacings_hz[k],
            finesse=DEFAULT_FINESSE,
            peak_depth=DEFAULT_COMB_DEPTHS[k],
            background_depth=0.0,
            tooth_shape=ToothShape.GAUSSIAN,
            comb_bandwidth_hz=DEFAULT_COMB_BANDWIDTH_HZ,
        )
        for k in range(3)
    )
    return RunConfig(
        grid=FrequencyGrid(resolution_hz=20e3, sample_count=1 << 14),
        combs=combs,
        scheme=scheme,
        source=SourceSpec(
            mean_photon_number=0.12,
            pulses_per_mode=750_000,
            pulse=PulseSpec(spectral_fwhm_hz=5e6),
        ),
        detector=DetectorSpec(
            coupling_efficiency=0.59,
            detection_efficiency=0.59,
            dark_rate_hz=150.0,
            bin_width_s=4.096e-9,
        ),
        limits=PlatformLimits(),
        seed=seed,
    )


def _section(data: dict, name: str) -> dict:
    value = data.get(name, {})
    if not isinstance(value, dict):
        raise ValueError(f"config section [{name}] must be a table")
    return value


def load_config(path: str | Path) -> RunConfig:
    """Read a TOML config file; omitted sections fall back to the defaults."""
    with open(path, "rb") as fh:
        try:
            data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ValueError(f"{path}: not valid TOML: {exc}") from None
    return config_from_dict(data)


def config_from_dict(data: dict) -> RunConfig:
    base = default_config()
    grid_d = _section(data, "grid")
    scheme_d = _section(data, "scheme")
    source_d = _section(data, "source")
    detector_d = _section(data, "detector")
    limits_d = _section(data, "limits")
    combs_d = data.get("combs", None)

    grid = FrequencyGrid(
        resolution_hz=float(grid_d.get("resolution_hz", base.grid.resolution_hz)),
        sample_count=int(grid_d.get("sample_count", base.grid.sample_count)),
    )

    n_f = int(scheme_d.get("n_frequency_modes", base.scheme.n_frequency_modes))
    n_s = int(scheme_d.get("n_spatial_modes", base.scheme.n_spatial_modes))
    dt = float(scheme_d.get("temporal_mode_ns", base.scheme.temporal_mode_s * 1e9)) * 1e-9
    dtp = float(scheme_d.get("mapped_mode_ns", base.scheme.mapped_mode_s * 1e9)) * 1e-9

    if combs_d is None:
        if n_f == base.scheme.n_frequency_modes:
            comb_dicts = [
                {
                    "center_offset_hz": c.center_offset_hz,
                    "comb_spacing_hz": c.comb_spacing_hz,
                    "finesse": c.finesse,
                    "peak_depth": c.peak_depth,
                    "background_depth": c.background_depth,
                    "tooth_shape": c.tooth_shape.value,
                    "comb_bandwidth_hz": c.comb_bandwidth_hz,
                }
                for c in base.combs
            ]
        else:
            # Scheme-only configs (capacity planning): generic combs on a
            # 100 MHz ladder with rule spacings and unit tooth depth.
            comb_dicts = [
                {"center_offset_hz": (k - (n_f + 1) / 2) * 100e6}
                for k in range(1, n_f + 1)
            ]
    else:
        comb_dicts = list(combs_d)
    if len(comb_dicts) != n_f:
        raise ValueError(f"need {n_f} [[combs]] blocks, got {len(comb_dicts)}")

    offsets = []
    combs = []
    for k, cd in enumerate(comb_dicts, start=1):
        if "center_offset_hz" not in cd:
            raise ValueError(f"comb {k}: center_offset_hz is required")
        offset = float(cd["center_offset_hz"])
        spacing = float(cd.get("comb_spacing_hz", centered_comb_spacing(k, dtp)))
        offsets.append(offset)
        combs.append(
            CombSpec(
                center_offset_hz=offset,
                comb_spacing_hz=spacing,
                finesse=float(cd.get("finesse", DEFAULT_FINESSE)),
                peak_depth=float(cd.get("peak_depth", 1.0)),
                background_depth=float(cd.get("background_depth", 0.0)),
                tooth_shape=ToothShape(cd.get("tooth_shape", "gaussian")),
                comb_bandwidth_hz=float(
                    cd.get("comb_bandwidth_hz", DEFAULT_COMB_BANDWIDTH_HZ)
                ),
            )
        )

    scheme = SchemeConfig(
        n_frequency_modes=n_f,
        n_spatial_modes=n_s,
        temporal_mode_s=dt,
        mapped_mode_s=dtp,
        mode_offsets_hz=tuple(offsets),
        comb_spacings_hz=tuple(c.comb_spacing_hz for c in combs),
    )

    source = SourceSpec(
        mean_photon_number=float(
            source_d.get("mean_photon_number", base.source.mean_photon_number)
        ),
        pulses_per_mode=int(source_d.get("pulses_per_mode", base.source.pulses_per_mode)),
        pulse=PulseSpec(
            spectral_fwhm_hz=float(
                source_d.get("spectral_fwhm_hz", base.source.pulse.spectral_fwhm_hz)
            ),
            emission_time_s=float(source_d.get("emission_time_ns", 0.0)) * 1e-9,
        ),
    )
    detector = DetectorSpec(
        coupling_efficiency=float(
            detector_d.get("coupling_efficiency", base.detector.coupling_efficiency)
        ),
        detection_efficiency=float(
            detector_d.get("detection_efficiency", base.detector.detection_efficiency)
        ),
        dark_rate_hz=float(detector_d.get("dark_rate_hz", base.detector.dark_rate_hz)),
        bin_width_s=float(detector_d.get("bin_width_ns", base.detector.bin_width_s * 1e9))
        * 1e-9,
        timing_jitter_s=float(detector_d.get("timing_jitter_ns", 0.0)) * 1e-9,
    )
    relax = limits_d.get("hyperfine_relaxation_time_s", None)
    limits = PlatformLimits(
        modulation_range_hz=float(
            limits_d.get("modulation_range_hz", base.limits.modulation_range_hz)
        ),
        inhomogeneous_broadening_hz=float(
            limits_d.get(
                "inhomogeneous_broadening_hz", base.limits.inhomogeneous_broadening_hz
            )
        ),
        min_mode_spacing_hz=float(
            limits_d.get("min_mode_spacing_hz", base.limits.min_mode_spacing_hz)
        ),
        min_stable_comb_spacing_hz=float(
            limits_d.get(
                "min_stable_comb_spacing_hz", base.limits.min_stable_comb_spacing_hz
            )
        ),
        per_afc_creation_time_s=float(
            limits_d.get("per_afc_creation_time_s", base.limits.per_afc_creation_time_s)
        ),
        per_mode_modulation_time_s=float(
            limits_d.get(
                "per_mode_modulation_time_s", base.limits.per_mode_modulation_time_s
            )
        ),
        hyperfine_relaxation_time_s=float(relax) if relax is not None else None,
    )
    return RunConfig(
        grid=grid,
        combs=tuple(combs),
        scheme=scheme,
        source=source,
        detector=detector,
        limits=limits,
        seed=int(data.get("seed", 0)),
    )
