"""Atomic-frequency-comb absorption profiles and their complex transfer functions.

An AFC is an equally spaced comb of absorption teeth burned into an
inhomogeneously broadened line.  This module builds optical-depth profiles
d(nu) for single combs on a uniform frequency grid, composes several combs
into one medium, and converts a profile into the complex field transfer
function

    H(nu) = exp(-d(nu)/2 + i*phi(nu)),

where the phase phi is the discrete Hilbert transform of d/2.  That choice
makes H the minimum-phase filter matching the magnitude exp(-d/2), i.e. the
unique causal response of a linear absorber with that attenuation.

All types are immutable after construction and all operations are pure
functions, so everything here is safe to use from concurrent workers.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path

import numpy as np

LN2 = float(np.log(2.0))

# Fraction of the grid (each side) pulled toward the band-edge mean before
# the Hilbert transform; the FFT-based transform assumes periodic data.
EDGE_TAPER_FRACTION = 0.05
# Resolution rule: at least this many samples across one tooth FWHM.
SAMPLES_PER_TOOTH = 10


class ToothShape(enum.Enum):
    GAUSSIAN = "gaussian"
    SQUARE = "square"


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform frequency grid centered on the simulation band center.

    ``sample_count`` must be a power of two; the grid spans
    ``resolution_hz * sample_count`` symmetrically around zero offset.  The
    conjugate time axis has step ``1/span`` and total duration
    ``1/resolution_hz``.
    """

    resolution_hz: float
    sample_count: int

    def __post_init__(self) -> None:
        if self.resolution_hz <= 0:
            raise ValueError("grid resolution must be positive")
        n = self.sample_count
        if n < 16 or (n & (n - 1)) != 0:
            raise ValueError("sample_count must be a power of two >= 16")

    @property
    def span_hz(self) -> float:
        return self.resolution_hz * self.sample_count

    @property
    def time_step_s(self) -> float:
        return 1.0 / self.span_hz

    @property
    def duration_s(self) -> float:
        return 1.0 / self.resolution_hz

    def frequencies(self) -> np.ndarray:
        """Frequency offsets in ascending order, zero at index n//2."""
        n = self.sample_count
        return (np.arange(n) - n // 2) * self.resolution_hz

    def times(self) -> np.ndarray:
        return np.arange(self.sample_count) * self.time_step_s


@dataclass(frozen=True)
class CombSpec:
    """Parametric description of one comb.

    ``finesse`` is the ratio of comb spacing to tooth FWHM, so the tooth
    FWHM is ``comb_spacing_hz / finesse``.  ``peak_depth`` is the optical
    depth added at a tooth center on top of the uniform
    ``background_depth``.  Teeth exist only within ``comb_bandwidth_hz``
    around ``center_offset_hz``; the background covers the whole grid.
    """

    center_offset_hz: float
    comb_spacing_hz: float
    finesse: float
    peak_depth: float
    comb_bandwidth_hz: float
    background_depth: float = 0.0
    tooth_shape: ToothShape = ToothShape.GAUSSIAN

    def __post_init__(self) -> None:
        if self.comb_spacing_hz <= 0:
            raise ValueError("comb spacing must be positive")
        if self.finesse <= 1:
            raise ValueError("finesse must exceed 1, teeth must not merge")
        if self.peak_depth < 0 or self.background_depth < 0:
            raise ValueError("optical depths must be non-negative")
        if self.comb_bandwidth_hz < 2 * self.comb_spacing_hz:
            raise ValueError("comb bandwidth must cover at least two spacings")

    @property
    def tooth_fwhm_hz(self) -> float:
        return self.comb_spacing_hz / self.finesse


@dataclass(frozen=True)
class AbsorptionProfile:
    """Sampled optical depth d(nu) on a frequency grid."""

    grid: FrequencyGrid
    depth: np.ndarray

    def __post_init__(self) -> None:
        depth = np.asarray(self.depth, dtype=float)
        if depth.shape != (self.grid.sample_count,):
            raise ValueError("depth length must equal the grid sample count")
        if not np.all(np.isfinite(depth)):
            raise ValueError("optical depth must be finite")
        if np.any(depth < 0):
            raise ValueError("optical depth must be non-negative everywhere")
        depth = depth.copy()
        depth.setflags(write=False)
        object.__setattr__(self, "depth", depth)


@dataclass(frozen=True)
class TransferFunction:
    """Complex field response H(nu) of the medium, |H| <= 1."""

    grid: FrequencyGrid
    response: np.ndarray

    def __post_init__(self) -> None:
        resp = np.asarray(self.response, dtype=complex)
        if resp.shape != (self.grid.sample_count,):
            raise ValueError("response length must equal the grid sample count")
        resp = resp.copy()
        resp.setflags(write=False)
        object.__setattr__(self, "response", resp)


def build_comb(spec: CombSpec, grid: FrequencyGrid) -> AbsorptionProfile:
    """Sample the comb of ``spec`` onto ``grid``.

    Teeth are centered at ``center_offset + m * spacing`` for every integer
    m whose center lies within the comb bandwidth.  Rejects grids that do
    not resolve the teeth (fewer than ``SAMPLES_PER_TOOTH`` samples per
    tooth FWHM) and combs whose teeth reach into the band-edge taper
    region, where the phase reconstruction is unreliable.
    """
    fwhm = spec.tooth_fwhm_hz
    if grid.resolution_hz > fwhm / SAMPLES_PER_TOOTH:
        raise ValueError(
            f"grid too coarse to resolve tooth: need df <= {fwhm / SAMPLES_PER_TOOTH:.6g} Hz, "
            f"got {grid.resolution_hz:.6g} Hz"
        )
    outer = abs(spec.center_offset_hz) + spec.comb_bandwidth_hz / 2 + 2 * fwhm
    usable = grid.span_hz / 2 * (1 - 2 * EDGE_TAPER_FRACTION)
    if outer > usable:
        raise ValueError(
            "comb teeth extend into the band-edge taper region; widen the grid span"
        )

    freqs = grid.frequencies()
    n_teeth = int(np.floor((spec.comb_bandwidth_hz / 2) / spec.comb_spacing_hz))
    centers = spec.center_offset_hz + np.arange(-n_teeth, n_teeth + 1) * spec.comb_spacing_hz
    offsets = freqs[:, None] - centers[None, :]
    if spec.tooth_shape is ToothShape.GAUSSIAN:
        teeth = np.exp(-4 * LN2 * offsets**2 / fwhm**2).sum(axis=1)
    else:
        teeth = (np.abs(offsets) < fwhm / 2).sum(axis=1).astype(float)
    depth = np.maximum(spec.background_depth + spec.peak_depth * teeth, 0.0)
    return AbsorptionProfile(grid, depth)


def compose(profiles: list[AbsorptionProfile]) -> AbsorptionProfile:
    """Pointwise sum of optical depths; all profiles must share one grid."""
    if not profiles:
        raise ValueError("compose requires at least one profile")
    grid = profiles[0].grid
    for p in profiles[1:]:
        if p.grid != grid:
            raise ValueError("cannot compose profiles on mismatched grids")
    total = np.sum([p.depth for p in profiles], axis=0)
    return AbsorptionProfile(grid, total)


def _edge_taper(depth: np.ndarray) -> np.ndarray:
    """Pull both band edges smoothly to a common reference level.

    The Hilbert transform below treats the band as periodic; any jump
    across the wrap point leaks into the phase.  A raised cosine over the
    outer EDGE_TAPER_FRACTION of the grid (each side) blends the profile
    into the mean of its outermost samples.  Linear in ``depth``, which
    keeps transfer functions of summed profiles exactly multiplicative.
    """
    n = depth.size
    m = max(2, int(round(EDGE_TAPER_FRACTION * n)))
    k = max(2, n // 100)
    edge_ref = 0.5 * (depth[:k].mean() + depth[-k:].mean())
    window = np.ones(n)
    ramp = 0.5 * (1 - np.cos(np.pi * np.arange(m) / m))
    window[:m] = ramp
    window[-m:] = ramp[::-1]
    return edge_ref + (depth - edge_ref) * window


def causal_phase(profile: AbsorptionProfile) -> np.ndarray:
    """Phase phi(nu) that makes exp(-d/2 + i*phi) a causal filter.

    Computed as the discrete Hilbert transform of d(nu)/2: fold the
    conjugate-domain representation onto non-negative delays and read the
    imaginary part back.  A constant profile therefore yields zero phase,
    and an even profile yields an odd phase.
    """
    n = profile.grid.sample_count
    half = _edge_taper(profile.depth) / 2.0
    spectrum = np.fft.fft(np.fft.ifftshift(half))
    spectrum[1 : n // 2] *= 2.0
    spectrum[n // 2 + 1 :] = 0.0
    return np.fft.fftshift(np.fft.ifft(spectrum)).imag.copy()


def to_transfer_function(profile: AbsorptionProfile) -> TransferFunction:
    """Minimum-phase transfer function H = exp(-d/2 + i*phi) of a profile."""
    phi = causal_phase(profile)
    response = np.exp(-profile.depth / 2.0 + 1j * phi)
    return TransferFunction(profile.grid, response)


def impulse_response(tf: TransferFunction) -> np.ndarray:
    """Complex impulse response h(t) on the grid's time axis (t = k/span)."""
    return np.fft.ifft(np.fft.ifftshift(tf.response)) * tf.grid.span_hz


def negative_time_energy_fraction(tf: TransferFunction) -> float:
    """Fraction of impulse-response energy in the wrapped (t < 0) half.

    Samples in the upper half of the periodic time axis represent negative
    times; a causal response leaves essentially no energy there.
    """
    h = impulse_response(tf)
    energy = np.abs(h) ** 2
    n = energy.size
    total = float(energy.sum())
    if total == 0.0:
        return 0.0
    return float(energy[n // 2 :].sum()) / total


PROFILE_HEADER = "# afc-profile v1"


def write_profile(profile: AbsorptionProfile, path: str | Path) -> None:
    """Two-column text export: frequency_hz, optical_depth."""
    freqs = profile.grid.frequencies()
    lines = [PROFILE_HEADER]
    lines.extend(f"{f:.17g} {d:.17g}" for f, d in zip(freqs, profile.depth))
    Path(path).write_text("\n".join(lines) + "\n")


def read_profile(path: str | Path) -> AbsorptionProfile:
    raw = Path(path).read_text().splitlines()
    if not raw or raw[0].strip() != PROFILE_HEADER:
        raise ValueError(f"{path}: missing '{PROFILE_HEADER}' header")
    rows = [line.split() for line in raw[1:] if line.strip()]
    freqs = np.array([float(r[0]) for r in rows])
    depth = np.array([float(r[1]) for r in rows])
    if freqs.size < 16:
        raise ValueError(f"{path}: too few samples for a valid profile")
    df = (freqs[-1] - freqs[0]) / (freqs.size - 1)
    grid = FrequencyGrid(resolution_hz=df, sample_count=freqs.size)
    return AbsorptionProfile(grid, depth)
