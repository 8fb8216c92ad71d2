"""Echo-efficiency and error-rate estimation from detection records.

For trials that input frequency mode k, the echo efficiency is the number
of clicks inside mode k's expected time window, corrected for coupling and
detector efficiency, divided by the total number of input photons N_in*mu:

    eta_echo(k)  = C_k / (eta_c * eta_d * N_in * mu)
    eta_error(k) = sum_{k' != k} C_k' / (eta_c * eta_d * N_in * mu)

Dark counts are deliberately not subtracted (the definitions above count
every click); the report carries the estimated dark floor separately.
Counting uncertainties are Poisson.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .detection import DetectionRecord
from .mapping import Classification, SchemeConfig, decode


@dataclass(frozen=True)
class WindowSet:
    """Expected arrival window [start, stop) per frequency mode, 1-based."""

    starts_s: tuple[float, ...]
    stops_s: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.starts_s) != len(self.stops_s) or not self.starts_s:
            raise ValueError("need matching non-empty start/stop lists")
        intervals = sorted(zip(self.starts_s, self.stops_s))
        for (s1, e1), (s2, _) in zip(intervals, intervals[1:]):
            if e1 > s2:
                raise ValueError("windows must be pairwise disjoint")
        for s, e in intervals:
            if e <= s:
                raise ValueError("window stop must exceed its start")

    @classmethod
    def from_scheme(cls, scheme: SchemeConfig) -> "WindowSet":
        """Windows [k*dt', (k+1)*dt') for k = 1..N_F (temporal mode 0)."""
        dtp = scheme.mapped_mode_s
        ks = range(1, scheme.n_frequency_modes + 1)
        return cls(tuple(k * dtp for k in ks), tuple((k + 1) * dtp for k in ks))

    @property
    def n_modes(self) -> int:
        return len(self.starts_s)

    def duration_s(self, mode: int) -> float:
        return self.stops_s[mode - 1] - self.starts_s[mode - 1]

    def counts(self, records: list[DetectionRecord]) -> np.ndarray:
        """Clicks per mode window."""
        times = np.array([r.timestamp_s for r in records], dtype=float)
        return np.array(
            [
                int(((times >= s) & (times < e)).sum())
                for s, e in zip(self.starts_s, self.stops_s)
            ]
        )


def _corrected_eta(counts: float, n_in: int, mu: float, eta_c: float, eta_d: float) -> tuple[float, float]:
    denom = eta_c * eta_d * n_in * mu
    if denom <= 0:
        if counts == 0:  # source off: a zero report is well defined
            return 0.0, 0.0
        raise ValueError("eta_c * eta_d * N_in * mu must be positive")
    return counts / denom, float(np.sqrt(counts)) / denom


def echo_efficiency(
    records: list[DetectionRecord],
    windows: WindowSet,
    mode: int,
    n_in: int,
    mu: float,
    eta_c: float,
    eta_d: float,
) -> tuple[float, float]:
    """(eta_echo, sigma) for trials that input ``mode``."""
    if not 1 <= mode <= windows.n_modes:
        raise ValueError(f"mode must be in [1, {windows.n_modes}]")
    counts = windows.counts(records)
    return _corrected_eta(float(counts[mode - 1]), n_in, mu, eta_c, eta_d)


def error_rate(
    records: list[DetectionRecord],
    windows: WindowSet,
    mode: int,
    n_in: int,
    mu: float,
    eta_c: float,
    eta_d: float,
) -> tuple[float, float]:
    """(eta_error, sigma): clicks in the other modes' windows, same trials."""
    if windows.n_modes < 2:
        raise ValueError("error rate needs at least two mode windows")
    if not 1 <= mode <= windows.n_modes:
        raise ValueError(f"mode must be in [1, {windows.n_modes}]")
    counts = windows.counts(records)
    others = float(counts.sum() - counts[mode - 1])
    return _corrected_eta(others, n_in, mu, eta_c, eta_d)


@dataclass(frozen=True)
class ModeEfficiency:
    mode: int
    eta_echo: float
    eta_echo_sigma: float
    eta_error: float
    eta_error_sigma: float
    raw_counts: int
    corrected_counts: float
    raw_error_counts: int
    corrected_error_counts: float
    window_start_ns: float
    window_stop_ns: float
    decode_counts: dict[str, int] = field(default_factory=dict)


@dataclass(frozen=True)
class EfficiencyReport:
    n_in: int
    mu: float
    eta_c: float
    eta_d: float
    modes: tuple[ModeEfficiency, ...]
    dark_floor_eta_error: float | None = None

    def to_dict(self) -> dict:
        out = asdict(self)
        out["modes"] = [asdict(m) for m in self.modes]
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "EfficiencyReport":
        modes = tuple(ModeEfficiency(**m) for m in data["modes"])
        rest = {k: v for k, v in data.items() if k != "modes"}
        return cls(modes=modes, **rest)


def split_by_mode(
    records: list[DetectionRecord], n_in: int, n_modes: int
) -> dict[int, list[DetectionRecord]]:
    """Group records by input mode via trial-index blocks.

    Trials for mode k occupy indices [(k-1)*n_in, k*n_in); the events file
    format has no mode column, so block membership carries the attribution.
    """
    groups: dict[int, list[DetectionRecord]] = {k: [] for k in range(1, n_modes + 1)}
    for r in records:
        mode = r.trial // n_in + 1
        if 1 <= mode <= n_modes:
            groups[mode].append(r)
    return groups


def decode_tally(
    records: list[DetectionRecord], scheme: SchemeConfig
) -> dict[str, int]:
    """Run the scheme decoder over records and count the classifications.

    Identified and ambiguous clicks are keyed with their decoded frequency
    mode ("identified_mode2"), transmitted and out-of-range clicks by the
    bare classification.
    """
    tally: dict[str, int] = {}
    for r in records:
        result = decode(scheme, r.channel, r.timestamp_s)
        if result.classification in (
            Classification.IDENTIFIED,
            Classification.AMBIGUOUS_WINDOW0,
        ):
            key = f"{result.classification.value}_mode{result.frequency_mode}"
        else:
            key = result.classification.value
        tally[key] = tally.get(key, 0) + 1
    return dict(sorted(tally.items()))


def summarize(
    records: list[DetectionRecord],
    scheme: SchemeConfig,
    windows: WindowSet,
    n_in: int,
    mu: float,
    eta_c: float,
    eta_d: float,
    dark_rate_hz: float | None = None,
    with_decode: bool = True,
) -> EfficiencyReport:
    """Full per-mode report from one event stream (modes in trial blocks)."""
    groups = split_by_mode(records, n_in, windows.n_modes)
    per_mode = []
    for mode in range(1, windows.n_modes + 1):
        recs = groups[mode]
        counts = windows.counts(recs)
        raw = int(counts[mode - 1])
        raw_err = int(counts.sum() - raw)
        eta_echo_val, eta_echo_sig = _corrected_eta(raw, n_in, mu, eta_c, eta_d)
        eta_err_val, eta_err_sig = _corrected_eta(raw_err, n_in, mu, eta_c, eta_d)
        per_mode.append(
            ModeEfficiency(
                mode=mode,
                eta_echo=eta_echo_val,
                eta_echo_sigma=eta_echo_sig,
                eta_error=eta_err_val,
                eta_error_sigma=eta_err_sig,
                raw_counts=raw,
                corrected_counts=raw / (eta_c * eta_d),
                raw_error_counts=raw_err,
                corrected_error_counts=raw_err / (eta_c * eta_d),
                window_start_ns=windows.starts_s[mode - 1] * 1e9,
                window_stop_ns=windows.stops_s[mode - 1] * 1e9,
                decode_counts=decode_tally(recs, scheme) if with_decode else {},
            )
        )
    dark_floor = None
    if dark_rate_hz is not None and mu > 0:
        # Expected eta_error from dark counts alone: clicks accumulated in
        # the other N_F - 1 windows, averaged over which mode is "expected".
        total = sum(windows.duration_s(k) for k in range(1, windows.n_modes + 1))
        other = total * (windows.n_modes - 1) / windows.n_modes
        dark_floor = dark_rate_hz * other / (eta_c * eta_d * mu)
    return EfficiencyReport(
        n_in=n_in,
        mu=mu,
        eta_c=eta_c,
        eta_d=eta_d,
        modes=tuple(per_mode),
        dark_floor_eta_error=dark_floor,
    )


def write_report(report: EfficiencyReport, path: str | Path) -> None:
    Path(path).write_text(json.dumps(report.to_dict(), indent=2) + "\n")


def read_report(path: str | Path) -> EfficiencyReport:
    return EfficiencyReport.from_dict(json.loads(Path(path).read_text()))


def write_histogram_csv(
    edges: np.ndarray, counts: np.ndarray, path: str | Path
) -> None:
    lines = ["bin_start_ns,counts"]
    lines.extend(f"{e * 1e9:.6f},{int(c)}" for e, c in zip(edges[:-1], counts))
    Path(path).write_text("\n".join(lines) + "\n")


def read_histogram_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    raw = Path(path).read_text().splitlines()
    if not raw or raw[0].strip() != "bin_start_ns,counts":
        raise ValueError(f"{path}: missing 'bin_start_ns,counts' header")
    starts, counts = [], []
    for line in raw[1:]:
        if not line.strip():
            continue
        a, b = line.split(",")
        starts.append(float(a) * 1e-9)
        counts.append(int(b))
    if len(starts) < 1:
        raise ValueError(f"{path}: empty histogram")
    width = starts[1] - starts[0] if len(starts) > 1 else starts[0] or 1.0
    edges = np.append(np.array(starts), starts[-1] + width)
    return edges, np.array(counts)
