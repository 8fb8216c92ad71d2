"""Pulse propagation through a comb medium and echo-train analysis.

A transform-limited Gaussian pulse is synthesized in the frequency domain,
multiplied by the medium transfer function, and transformed to an intensity
trace.  A comb with spacing D re-emits absorbed light as echoes at delays
n/D; ``extract_echoes`` integrates the trace in windows around those delays
and ``analytic_echo_efficiency`` provides the standard closed-form estimate
of the first-echo efficiency for Gaussian teeth, used as a cross-check on
the numerical propagation (the numerics are the ground truth).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .spectral import LN2, FrequencyGrid, TransferFunction

# A Gaussian amplitude this small relative to peak counts as fully contained.
CONTAINMENT_AMPLITUDE = 1e-8
# Gaussian tooth shape: mean depth over one period = peak depth / finesse * this.
GAUSSIAN_TOOTH_AREA = float(np.sqrt(np.pi / (4 * LN2)))


class PulseShape(enum.Enum):
    GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class PulseSpec:
    """Transform-limited input pulse.

    ``spectral_fwhm_hz`` is the FWHM of the intensity spectrum |E(nu)|^2;
    the corresponding intensity FWHM in time is 2*ln2/(pi*fwhm).
    ``emission_time_s`` places the pulse peak on the output time axis.
    """

    spectral_fwhm_hz: float
    carrier_offset_hz: float = 0.0
    emission_time_s: float = 0.0
    shape: PulseShape = PulseShape.GAUSSIAN

    def __post_init__(self) -> None:
        if self.spectral_fwhm_hz <= 0:
            raise ValueError("spectral FWHM must be positive")


@dataclass(frozen=True)
class TemporalTrace:
    """Output intensity vs time, normalized so the input pulse has energy 1."""

    time_step_s: float
    intensity: np.ndarray

    def __post_init__(self) -> None:
        intensity = np.asarray(self.intensity, dtype=float)
        if intensity.ndim != 1 or intensity.size == 0:
            raise ValueError("intensity must be a non-empty 1-d array")
        if not np.all(np.isfinite(intensity)):
            raise ValueError("intensity must be finite")
        if np.any(intensity < 0):
            raise ValueError("intensity must be non-negative")
        intensity = intensity.copy()
        intensity.setflags(write=False)
        object.__setattr__(self, "intensity", intensity)
        if self.time_step_s <= 0:
            raise ValueError("time step must be positive")

    @property
    def duration_s(self) -> float:
        return self.time_step_s * self.intensity.size

    def times(self) -> np.ndarray:
        return np.arange(self.intensity.size) * self.time_step_s

    def total_energy(self) -> float:
        return float(self.intensity.sum() * self.time_step_s)


@dataclass(frozen=True)
class EchoSummary:
    """Integrated energy per echo order; order 0 is the transmitted pulse."""

    comb_spacing_hz: float
    window_centers_s: tuple[float, ...]
    energies: tuple[float, ...]

    @property
    def transmitted_fraction(self) -> float:
        return self.energies[0]


def pulse_spectrum(pulse: PulseSpec, grid: FrequencyGrid) -> np.ndarray:
    """Field spectrum E(nu) on the grid, normalized to unit pulse energy.

    Raises if the spectrum is not contained in the grid span, rather than
    silently truncating the pulse.
    """
    # Amplitude e^-8 at this offset; beyond it the Gaussian is negligible.
    containment = pulse.spectral_fwhm_hz * float(
        np.sqrt(np.log(1.0 / CONTAINMENT_AMPLITUDE) / (2 * LN2))
    )
    half_span = grid.span_hz / 2
    if pulse.carrier_offset_hz - containment < -half_span or (
        pulse.carrier_offset_hz + containment >= half_span
    ):
        raise ValueError(
            "pulse spectrum clipped by grid: carrier offset "
            f"{pulse.carrier_offset_hz:.6g} Hz +- {containment:.6g} Hz exceeds the span"
        )
    freqs = grid.frequencies()
    # |E|^2 is Gaussian with the requested FWHM; the linear phase delays
    # the pulse peak to the emission time under the e^{+2pi i nu t} synthesis.
    amp = np.exp(-2 * LN2 * (freqs - pulse.carrier_offset_hz) ** 2 / pulse.spectral_fwhm_hz**2)
    amp = amp * np.exp(-2j * np.pi * freqs * pulse.emission_time_s)
    norm = np.sqrt(np.sum(np.abs(amp) ** 2) * grid.resolution_hz)
    return amp / norm


def propagate(pulse: PulseSpec, tf: TransferFunction) -> TemporalTrace:
    """Propagate ``pulse`` through ``tf`` and return the intensity trace.

    The trace contains the transmitted pulse near the emission time and
    echoes near emission_time + n/D for each comb of spacing D in the
    medium.  Total output energy never exceeds the input energy of 1.
    """
    grid = tf.grid
    spectrum = pulse_spectrum(pulse, grid) * tf.response
    field = grid.span_hz * np.fft.ifft(np.fft.ifftshift(spectrum))
    return TemporalTrace(grid.time_step_s, np.abs(field) ** 2)


def _window_energy(trace: TemporalTrace, t_lo: float, t_hi: float) -> float:
    """Integrated intensity in [t_lo, t_hi), wrapping on the periodic axis."""
    period = trace.duration_s
    t = trace.times()
    lo = t_lo % period
    hi = t_hi % period
    if lo <= hi:
        mask = (t >= lo) & (t < hi)
    else:
        mask = (t >= lo) | (t < hi)
    return float(trace.intensity[mask].sum() * trace.time_step_s)


def extract_echoes(
    trace: TemporalTrace, comb_spacing_hz: float, orders: int
) -> EchoSummary:
    """Integrate the trace in windows of width 1/(2D) centered at n/D.

    Order 0 (the transmitted pulse) wraps across t = 0.  ``orders`` is the
    highest echo order included.
    """
    if comb_spacing_hz <= 0:
        raise ValueError("comb spacing must be positive")
    if orders < 0:
        raise ValueError("orders must be non-negative")
    delay = 1.0 / comb_spacing_hz
    if orders * delay + delay / 4 > trace.duration_s:
        raise ValueError(
            f"trace of {trace.duration_s:.3g} s does not cover echo order {orders}"
        )
    centers = []
    energies = []
    for n in range(orders + 1):
        center = n * delay
        centers.append(center)
        energies.append(_window_energy(trace, center - delay / 4, center + delay / 4))
    return EchoSummary(comb_spacing_hz, tuple(centers), tuple(energies))


def echo_peak_time(trace: TemporalTrace, comb_spacing_hz: float, order: int = 1) -> float:
    """Peak arrival time of one echo, refined by parabolic interpolation.

    Searches within half a window of the nominal delay order/D and fits a
    parabola through the three samples around the maximum, giving
    sub-sample timing.
    """
    delay = order / comb_spacing_hz
    dt = trace.time_step_s
    half = max(1, int(round(1.0 / (4 * comb_spacing_hz) / dt)))
    center = int(round(delay / dt))
    lo = max(0, center - half)
    hi = min(trace.intensity.size, center + half + 1)
    if hi - lo < 3:
        raise ValueError("trace too short around the requested echo order")
    seg = trace.intensity[lo:hi]
    i = int(np.argmax(seg)) + lo
    if 0 < i < trace.intensity.size - 1:
        y0, y1, y2 = trace.intensity[i - 1 : i + 2]
        curvature = y0 - 2 * y1 + y2
        shift = 0.5 * (y0 - y2) / curvature if curvature != 0 else 0.0
    else:
        shift = 0.0
    return (i + shift) * dt


def analytic_echo_efficiency(
    peak_depth: float, finesse: float, background_depth: float = 0.0
) -> float:
    """Closed-form first-echo efficiency for a Gaussian-tooth comb.

    With effective depth dt = (d/F)*sqrt(pi/(4 ln2)) (the mean optical
    depth of the tooth train), the first-echo intensity efficiency is

        eta = dt^2 * exp(-dt) * exp(-7/F^2) * exp(-d0).

    This is an approximation specific to Gaussian teeth; numerical
    propagation remains the ground truth, and square-tooth combs should
    skip this cross-check.
    """
    if finesse <= 1:
        raise ValueError("finesse must exceed 1")
    if peak_depth < 0 or background_depth < 0:
        raise ValueError("optical depths must be non-negative")
    d_eff = (peak_depth / finesse) * GAUSSIAN_TOOTH_AREA
    return float(
        d_eff**2 * np.exp(-d_eff) * np.exp(-7.0 / finesse**2) * np.exp(-background_depth)
    )


TRACE_HEADER = "# trace v1"


def write_trace(trace: TemporalTrace, path: str | Path) -> None:
    """Two-column text export: time_ns, intensity."""
    t_ns = trace.times() * 1e9
    lines = [TRACE_HEADER]
    lines.extend(f"{t:.17g} {v:.17g}" for t, v in zip(t_ns, trace.intensity))
    Path(path).write_text("\n".join(lines) + "\n")


def read_trace(path: str | Path) -> TemporalTrace:
    raw = Path(path).read_text().splitlines()
    if not raw or raw[0].strip() != TRACE_HEADER:
        raise ValueError(f"{path}: missing '{TRACE_HEADER}' header")
    rows = [line.split() for line in raw[1:] if line.strip()]
    t_ns = np.array([float(r[0]) for r in rows])
    intensity = np.array([float(r[1]) for r in rows])
    if t_ns.size < 2:
        raise ValueError(f"{path}: too few samples for a valid trace")
    dt = (t_ns[-1] - t_ns[0]) / (t_ns.size - 1) * 1e-9
    return TemporalTrace(dt, intensity)
