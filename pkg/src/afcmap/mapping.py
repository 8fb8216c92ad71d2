"""Time-to-space and frequency-to-time mode mapping and its decoder.

Incoming light is framed into temporal modes of duration dt.  A switch
routes temporal mode j to spatial channel j mod N_S (round robin).  Each
channel carries one comb medium per frequency mode; the comb for frequency
mode k delays its light so the echo lands in mapped window k, i.e. in
[j*dt + k*dt', j*dt + (k+1)*dt') on the channel's clock.  Window 0 is
reserved for light transmitted without absorption.

Two inequalities make the decoding unique:

    dt <= dt'                (one frequency mode per mapped window)
    N_F * dt' <= N_S * dt    (windows of successive modes on one channel
                              do not overlap)

Choosing comb spacings D_k = 1/((k + 1/2) * dt') centers each echo in its
window.  Temporal modes are 0-based, frequency modes 1-based.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass


@dataclass(frozen=True)
class Violation:
    """One violated scheme inequality with its numeric slack (negative = broken)."""

    name: str
    detail: str
    slack: float


@dataclass(frozen=True)
class SchemeConfig:
    n_frequency_modes: int
    n_spatial_modes: int
    temporal_mode_s: float
    mapped_mode_s: float
    mode_offsets_hz: tuple[float, ...]
    comb_spacings_hz: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.n_frequency_modes < 1 or self.n_spatial_modes < 1:
            raise ValueError("mode counts must be at least 1")
        if self.temporal_mode_s <= 0 or self.mapped_mode_s <= 0:
            raise ValueError("mode durations must be positive")
        if len(self.mode_offsets_hz) != self.n_frequency_modes:
            raise ValueError("need one frequency offset per frequency mode")
        if len(self.comb_spacings_hz) != self.n_frequency_modes:
            raise ValueError("need one comb spacing per frequency mode")
        object.__setattr__(self, "mode_offsets_hz", tuple(float(x) for x in self.mode_offsets_hz))
        object.__setattr__(
            self, "comb_spacings_hz", tuple(float(x) for x in self.comb_spacings_hz)
        )

    @classmethod
    def with_centered_echoes(
        cls,
        n_frequency_modes: int,
        n_spatial_modes: int,
        temporal_mode_s: float,
        mapped_mode_s: float | None = None,
        mode_offsets_hz: tuple[float, ...] | None = None,
    ) -> "SchemeConfig":
        """Build a config whose comb spacings center each echo in its window."""
        if mapped_mode_s is None:
            mapped_mode_s = temporal_mode_s
        if mode_offsets_hz is None:
            mode_offsets_hz = tuple(
                (k - (n_frequency_modes + 1) / 2) * 100e6 for k in range(1, n_frequency_modes + 1)
            )
        spacings = tuple(centered_comb_spacing(k, mapped_mode_s) for k in range(1, n_frequency_modes + 1))
        return cls(
            n_frequency_modes=n_frequency_modes,
            n_spatial_modes=n_spatial_modes,
            temporal_mode_s=temporal_mode_s,
            mapped_mode_s=mapped_mode_s,
            mode_offsets_hz=tuple(mode_offsets_hz),
            comb_spacings_hz=spacings,
        )


def centered_comb_spacing(frequency_mode: int, mapped_mode_s: float) -> float:
    """Comb spacing that puts the mode-k echo at the center of mapped window k."""
    return 1.0 / ((frequency_mode + 0.5) * mapped_mode_s)


class Classification(enum.Enum):
    IDENTIFIED = "identified"
    TRANSMITTED = "transmitted"
    AMBIGUOUS_WINDOW0 = "ambiguous_window0"
    OUT_OF_RANGE = "out_of_range"


@dataclass(frozen=True)
class ModeAssignment:
    """Round-robin channel assignment of one arrival."""

    temporal_mode: int
    spatial_channel: int
    frequency_mode: int

    @classmethod
    def from_arrival(
        cls, config: SchemeConfig, temporal_mode: int, frequency_mode: int
    ) -> "ModeAssignment":
        return cls(
            temporal_mode=temporal_mode,
            spatial_channel=temporal_mode % config.n_spatial_modes,
            frequency_mode=frequency_mode,
        )


@dataclass(frozen=True)
class DecodedResult:
    classification: Classification
    frequency_mode: int | None = None
    temporal_mode: int | None = None


def validate(config: SchemeConfig) -> list[Violation]:
    """Check the scheme inequalities; violations are data, not faults."""
    violations = []
    slack1 = config.mapped_mode_s - config.temporal_mode_s
    if slack1 < 0:
        violations.append(
            Violation(
                name="temporal_within_mapped",
                detail="temporal mode duration must not exceed the mapped window spacing",
                slack=slack1,
            )
        )
    slack2 = (
        config.n_spatial_modes * config.temporal_mode_s
        - config.n_frequency_modes * config.mapped_mode_s
    )
    if slack2 < 0:
        violations.append(
            Violation(
                name="windows_fit_channel_cycle",
                detail="N_F mapped windows must fit in one round-robin cycle N_S * dt",
                slack=slack2,
            )
        )
    return violations


def encode(config: SchemeConfig, temporal_mode: int, frequency_mode: int) -> tuple[int, float]:
    """Nominal (channel, detection time) of an echo: the center of its window."""
    if temporal_mode < 0:
        raise ValueError("temporal mode index must be non-negative")
    if not 1 <= frequency_mode <= config.n_frequency_modes:
        raise ValueError(
            f"frequency mode must be in [1, {config.n_frequency_modes}], got {frequency_mode}"
        )
    channel = temporal_mode % config.n_spatial_modes
    time = (
        temporal_mode * config.temporal_mode_s
        + (frequency_mode + 0.5) * config.mapped_mode_s
    )
    return channel, time


def decode(
    config: SchemeConfig, channel: int, time_s: float, *, check_valid: bool = True
) -> DecodedResult:
    """Invert the mapping: which (frequency, temporal) mode produced a click.

    Scans the temporal modes routed to ``channel`` whose window band covers
    ``time_s``.  A hit in an echo window (k >= 1) identifies the pair; a
    hit only in some window 0 is transmitted light.  When an echo window of
    one temporal mode overlaps window 0 of a later one (possible whenever
    (N_F+1)*dt' > N_S*dt), the echo reading is returned but flagged
    ``AMBIGUOUS_WINDOW0``: the click could equally be unabsorbed light.
    """
    if check_valid:
        problems = validate(config)
        if problems:
            names = ", ".join(v.name for v in problems)
            raise ValueError(f"cannot decode with an infeasible scheme ({names})")
    if not 0 <= channel < config.n_spatial_modes:
        raise ValueError(f"channel must be in [0, {config.n_spatial_modes})")

    dt = config.temporal_mode_s
    dtp = config.mapped_mode_s
    n_f = config.n_frequency_modes
    n_s = config.n_spatial_modes

    echo_hits: list[tuple[int, int]] = []
    window0_hits: list[int] = []
    if time_s >= 0:
        j = int(time_s // dt)
        j -= (j - channel) % n_s  # largest j <= t/dt routed to this channel
        while j >= 0 and j * dt + (n_f + 1) * dtp > time_s:
            window = int((time_s - j * dt) // dtp)
            if window == 0:
                window0_hits.append(j)
            elif 1 <= window <= n_f:
                echo_hits.append((j, window))
            j -= n_s

    if echo_hits:
        j, k = min(echo_hits)
        if window0_hits:
            return DecodedResult(Classification.AMBIGUOUS_WINDOW0, k, j)
        return DecodedResult(Classification.IDENTIFIED, k, j)
    if window0_hits:
        return DecodedResult(Classification.TRANSMITTED, None, min(window0_hits))
    return DecodedResult(Classification.OUT_OF_RANGE)


@dataclass(frozen=True)
class Counterexample:
    temporal_mode: int
    frequency_mode: int
    decoded: DecodedResult


def roundtrip_check(
    config: SchemeConfig, max_temporal_mode: int, *, check_valid: bool = True
) -> Counterexample | None:
    """Exhaustively verify decode(encode(j, k)) == (j, k); None means ok."""
    for j in range(max_temporal_mode + 1):
        for k in range(1, config.n_frequency_modes + 1):
            channel, time = encode(config, j, k)
            result = decode(config, channel, time, check_valid=check_valid)
            if result.frequency_mode != k or result.temporal_mode != j:
                return Counterexample(j, k, result)
    return None
