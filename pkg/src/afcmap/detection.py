"""Monte Carlo single-photon detection on top of propagated intensity traces.

Each trial inputs one weak coherent pulse: the photon number is Poisson
with mean mu, each photon independently survives fiber coupling and
detector efficiency with probability eta_c * eta_d, and a surviving photon
is detected at a time drawn from the (sub-normalized) trace intensity, the
missing mass being light absorbed or emitted outside the trace.  Dark
counts arrive as a uniform Poisson process over the observation window.

Trials are grouped into fixed-size batches, each driven by its own child
of the master seed, so batches can run on parallel workers while the merged
record list stays byte-for-byte reproducible for a given seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .propagation import PulseSpec, TemporalTrace

TRIALS_PER_BATCH = 1 << 16


@dataclass(frozen=True)
class DetectorSpec:
    coupling_efficiency: float
    detection_efficiency: float
    dark_rate_hz: float
    bin_width_s: float
    timing_jitter_s: float = 0.0

    def __post_init__(self) -> None:
        for name in ("coupling_efficiency", "detection_efficiency"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be a probability in [0, 1]")
        if self.dark_rate_hz < 0:
            raise ValueError("dark rate must be non-negative")
        if self.bin_width_s <= 0:
            raise ValueError("bin width must be positive")
        if self.timing_jitter_s < 0:
            raise ValueError("timing jitter must be non-negative")

    @property
    def total_efficiency(self) -> float:
        return self.coupling_efficiency * self.detection_efficiency


@dataclass(frozen=True)
class SourceSpec:
    mean_photon_number: float
    pulses_per_mode: int
    pulse: PulseSpec

    def __post_init__(self) -> None:
        # mu = 0 is allowed as an explicit "source off" switch.
        if self.mean_photon_number < 0:
            raise ValueError("mean photon number must be non-negative")
        if self.pulses_per_mode < 1:
            raise ValueError("pulses per mode must be at least 1")


@dataclass(frozen=True)
class DetectionRecord:
    """One click: trial index, spatial channel, arrival time within the trial frame.

    ``origin`` ('signal' or 'dark') is simulation-only metadata; externally
    recorded events may omit it.
    """

    trial: int
    channel: int
    timestamp_s: float
    origin: str = "signal"

    def __post_init__(self) -> None:
        if self.timestamp_s < 0:
            raise ValueError("timestamps must be non-negative")
        if self.origin not in ("signal", "dark"):
            raise ValueError("origin must be 'signal' or 'dark'")


def simulate_trials(
    source: SourceSpec,
    detector: DetectorSpec,
    trace: TemporalTrace,
    window: tuple[float, float],
    seed: int | np.random.SeedSequence,
    *,
    n_trials: int | None = None,
    channel: int = 0,
    trial_offset: int = 0,
) -> list[DetectionRecord]:
    """Simulate ``n_trials`` pulses (default: source.pulses_per_mode).

    ``window`` is the gated observation span (start, stop) in seconds;
    clicks outside it are dropped and dark counts are uniform over it.
    Deterministic for a given seed (an int or a spawned SeedSequence).
    ``trial_offset`` shifts the recorded trial indices, letting several
    runs share one event stream.
    """
    start, stop = window
    if not 0 <= start < stop:
        raise ValueError("window must satisfy 0 <= start < stop")
    if stop > trace.duration_s * (1 + 1e-12):
        raise ValueError("observation window extends past the trace")
    total_energy = trace.total_energy()
    if total_energy > 1.0 + 1e-6:
        raise ValueError(
            f"trace energy {total_energy:.6g} exceeds 1; normalize to unit input energy"
        )

    if n_trials is None:
        n_trials = source.pulses_per_mode
    mu = source.mean_photon_number
    eta = detector.total_efficiency
    dark_mean = detector.dark_rate_hz * (stop - start)
    # Inverse-CDF lookup table for landing times on the trace.
    cdf = np.cumsum(trace.intensity) * trace.time_step_s

    records: list[DetectionRecord] = []
    root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    n_batches = (n_trials + TRIALS_PER_BATCH - 1) // TRIALS_PER_BATCH
    for batch, seq in enumerate(root.spawn(n_batches)):
        rng = np.random.default_rng(seq)
        base = trial_offset + batch * TRIALS_PER_BATCH
        size = min(TRIALS_PER_BATCH, n_trials - batch * TRIALS_PER_BATCH)

        photons = rng.poisson(mu, size)
        trial_of_photon = np.repeat(np.arange(size), photons)
        survived = rng.random(trial_of_photon.size) < eta
        trial_of_photon = trial_of_photon[survived]
        # One uniform draw serves both as the landing Bernoulli (mass =
        # total trace energy) and as the inverse-CDF position.
        u = rng.random(trial_of_photon.size)
        landed = u < cdf[-1]
        trial_of_photon = trial_of_photon[landed]
        idx = np.searchsorted(cdf, u[landed])
        times = (idx + rng.random(idx.size)) * trace.time_step_s
        if detector.timing_jitter_s > 0:
            times = times + rng.normal(0.0, detector.timing_jitter_s, times.size)
        keep = (times >= start) & (times < stop)
        for t_idx, t in zip(trial_of_photon[keep], times[keep]):
            records.append(DetectionRecord(base + int(t_idx), channel, float(t), "signal"))

        darks = rng.poisson(dark_mean, size)
        trial_of_dark = np.repeat(np.arange(size), darks)
        dark_times = start + rng.random(trial_of_dark.size) * (stop - start)
        for t_idx, t in zip(trial_of_dark, dark_times):
            records.append(DetectionRecord(base + int(t_idx), channel, float(t), "dark"))

    records.sort(key=lambda r: (r.trial, r.timestamp_s))
    return records


def histogram(
    records: list[DetectionRecord],
    bin_width_s: float,
    t_max_s: float | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Bin record timestamps; returns (bin edges, counts).

    Bins are [i*w, (i+1)*w).  ``t_max_s`` fixes the axis end; by default
    the last record sets it.
    """
    if bin_width_s <= 0:
        raise ValueError("bin width must be positive")
    times = np.array([r.timestamp_s for r in records], dtype=float)
    if t_max_s is None:
        t_max_s = float(times.max()) + bin_width_s if times.size else bin_width_s
    n_bins = max(1, int(np.ceil(t_max_s / bin_width_s)))
    edges = np.arange(n_bins + 1) * bin_width_s
    idx = np.floor(times / bin_width_s).astype(int)
    idx = idx[(idx >= 0) & (idx < n_bins)]
    counts = np.bincount(idx, minlength=n_bins)
    return edges, counts


EVENTS_HEADER = "# events v1"


def write_events(records: list[DetectionRecord], path: str | Path) -> None:
    """One record per line: trial_id,channel,timestamp_ns[,origin]."""
    lines = [EVENTS_HEADER]
    lines.extend(
        f"{r.trial},{r.channel},{r.timestamp_s * 1e9:.6f},{r.origin}" for r in records
    )
    Path(path).write_text("\n".join(lines) + "\n")


def read_events(path: str | Path) -> list[DetectionRecord]:
    """Parse an events file; raises with line numbers for malformed lines."""
    raw = Path(path).read_text().splitlines()
    if not raw or raw[0].strip() != EVENTS_HEADER:
        raise ValueError(f"{path}: missing '{EVENTS_HEADER}' header")
    records = []
    bad: list[tuple[int, str]] = []
    for lineno, line in enumerate(raw[1:], start=2):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        if len(parts) not in (3, 4):
            bad.append((lineno, "expected trial,channel,timestamp_ns[,origin]"))
            continue
        try:
            trial = int(parts[0])
            channel = int(parts[1])
            timestamp = float(parts[2]) * 1e-9
            origin = parts[3].strip() if len(parts) == 4 else "signal"
            records.append(DetectionRecord(trial, channel, timestamp, origin))
        except ValueError as exc:
            bad.append((lineno, str(exc)))
    if bad:
        detail = "; ".join(f"line {n}: {msg}" for n, msg in bad[:10])
        more = f" (+{len(bad) - 10} more)" if len(bad) > 10 else ""
        raise ValueError(f"{path}: {len(bad)} malformed line(s): {detail}{more}")
    return records
