"""Multiplexing capacity planning for comb-based frequency-mode mapping.

How many frequency modes fit on a given platform, how small the slowest
mode's comb spacing gets under the window-centering rule, and how long
preparing all the combs takes.  Values are reported exactly; hardware
limits (pump modulation range, inhomogeneous bandwidth, the smallest comb
spacing the pump laser can hold stably, hole lifetime) enter as
configurable ``PlatformLimits``.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

from . import mapping
from .mapping import SchemeConfig, Violation, centered_comb_spacing


@dataclass(frozen=True)
class PlatformLimits:
    modulation_range_hz: float = 15e9
    inhomogeneous_broadening_hz: float = 10e9
    min_mode_spacing_hz: float = 100e6
    min_stable_comb_spacing_hz: float = 500e3
    per_afc_creation_time_s: float = 0.050
    per_mode_modulation_time_s: float = 0.010
    # Hole lifetime budget; no default, acceptability depends on the system.
    hyperfine_relaxation_time_s: float | None = None

    def __post_init__(self) -> None:
        for name in (
            "modulation_range_hz",
            "inhomogeneous_broadening_hz",
            "min_mode_spacing_hz",
            "min_stable_comb_spacing_hz",
            "per_afc_creation_time_s",
            "per_mode_modulation_time_s",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.hyperfine_relaxation_time_s is not None and self.hyperfine_relaxation_time_s <= 0:
            raise ValueError("hyperfine_relaxation_time_s must be positive when set")


@dataclass(frozen=True)
class PlanReport:
    n_frequency_modes: int
    n_spatial_modes: int
    temporal_mode_s: float
    mapped_mode_s: float
    max_modes: int
    min_required_comb_spacing_hz: float
    total_creation_time_s: float
    violations: tuple[Violation, ...]
    notes: tuple[str, ...] = ()

    @property
    def feasible(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        out = asdict(self)
        out["violations"] = [asdict(v) for v in self.violations]
        out["notes"] = list(self.notes)
        return out

    def to_text(self) -> str:
        lines = [
            "capacity plan",
            f"  frequency modes requested : {self.n_frequency_modes}",
            f"  spatial channels          : {self.n_spatial_modes}",
            f"  temporal mode duration    : {self.temporal_mode_s * 1e9:.1f} ns",
            f"  mapped window spacing     : {self.mapped_mode_s * 1e9:.1f} ns",
            f"  platform mode limit       : {self.max_modes}",
            f"  smallest comb spacing     : {self.min_required_comb_spacing_hz / 1e3:.3f} kHz",
            f"  total comb creation time  : {self.total_creation_time_s * 1e3:.1f} ms",
            f"  feasible                  : {'yes' if self.feasible else 'no'}",
        ]
        for v in self.violations:
            lines.append(f"  violated: {v.name} (slack {v.slack:.6g}) - {v.detail}")
        for note in self.notes:
            lines.append(f"  note: {note}")
        return "\n".join(lines)


def max_modes(limits: PlatformLimits) -> int:
    """Mode count the platform supports: usable band over the mode spacing.

    The usable band is the smaller of the pump modulation range and the
    inhomogeneous broadening.
    """
    band = min(limits.modulation_range_hz, limits.inhomogeneous_broadening_hz)
    return int(band // limits.min_mode_spacing_hz)


def min_comb_spacing(n_frequency_modes: int, mapped_mode_s: float) -> float:
    """Comb spacing of the slowest mode under the window-centering rule."""
    if n_frequency_modes < 1:
        raise ValueError("need at least one frequency mode")
    if mapped_mode_s <= 0:
        raise ValueError("mapped window spacing must be positive")
    return centered_comb_spacing(n_frequency_modes, mapped_mode_s)


def creation_time_bound(n_modes: int, limits: PlatformLimits) -> float:
    """Upper bound on total comb preparation time, linear in the mode count."""
    if n_modes < 1:
        raise ValueError("need at least one mode")
    return n_modes * (limits.per_afc_creation_time_s + limits.per_mode_modulation_time_s)


def check_plan(
    n_frequency_modes: int,
    n_spatial_modes: int,
    temporal_mode_s: float,
    mapped_mode_s: float,
    limits: PlatformLimits,
) -> PlanReport:
    """Aggregate feasibility report for a proposed configuration."""
    if n_frequency_modes < 1 or n_spatial_modes < 1:
        raise ValueError("mode counts must be at least 1")
    if temporal_mode_s <= 0 or mapped_mode_s <= 0:
        raise ValueError("mode durations must be positive")

    scheme = SchemeConfig.with_centered_echoes(
        n_frequency_modes, n_spatial_modes, temporal_mode_s, mapped_mode_s
    )
    violations = list(mapping.validate(scheme))
    notes = []

    limit = max_modes(limits)
    if n_frequency_modes > limit:
        violations.append(
            Violation(
                name="platform_mode_limit",
                detail=f"platform supports at most {limit} frequency modes",
                slack=float(limit - n_frequency_modes),
            )
        )

    smallest = min_comb_spacing(n_frequency_modes, mapped_mode_s)
    if smallest < limits.min_stable_comb_spacing_hz:
        violations.append(
            Violation(
                name="comb_spacing_stability",
                detail=(
                    f"slowest mode needs {smallest / 1e3:.3f} kHz spacing, below the "
                    f"{limits.min_stable_comb_spacing_hz / 1e3:.0f} kHz stability limit; "
                    "a narrower pump laser linewidth is required"
                ),
                slack=smallest - limits.min_stable_comb_spacing_hz,
            )
        )

    creation = creation_time_bound(n_frequency_modes, limits)
    if limits.hyperfine_relaxation_time_s is not None:
        if creation > limits.hyperfine_relaxation_time_s:
            violations.append(
                Violation(
                    name="creation_time_budget",
                    detail="comb preparation exceeds the hole relaxation budget",
                    slack=limits.hyperfine_relaxation_time_s - creation,
                )
            )
    else:
        notes.append("no hole-lifetime budget set; creation time reported unchecked")
    notes.append(
        "smallest comb spacing reported exactly from the window-centering rule"
    )

    return PlanReport(
        n_frequency_modes=n_frequency_modes,
        n_spatial_modes=n_spatial_modes,
        temporal_mode_s=temporal_mode_s,
        mapped_mode_s=mapped_mode_s,
        max_modes=limit,
        min_required_comb_spacing_hz=smallest,
        total_creation_time_s=creation,
        violations=tuple(violations),
        notes=tuple(notes),
    )


def write_plan(report: PlanReport, path: str | Path) -> None:
    Path(path).write_text(json.dumps(report.to_dict(), indent=2) + "\n")
