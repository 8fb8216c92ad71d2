"""Simulator and analysis toolkit for single-shot identification of discrete
frequency modes of single-photon-level pulses, built on atomic-frequency-comb
frequency-to-time mode mapping combined with time-to-space switching."""

from .analysis import EfficiencyReport, ModeEfficiency, WindowSet, echo_efficiency, error_rate, summarize
from .config import RunConfig, default_config, load_config
from .detection import DetectionRecord, DetectorSpec, SourceSpec, histogram, simulate_trials
from .mapping import (
    Classification,
    DecodedResult,
    ModeAssignment,
    SchemeConfig,
    Violation,
    decode,
    encode,
    roundtrip_check,
    validate,
)
from .planner import PlanReport, PlatformLimits, check_plan, creation_time_bound, max_modes, min_comb_spacing
from .propagation import (
    EchoSummary,
    PulseSpec,
    TemporalTrace,
    analytic_echo_efficiency,
    echo_peak_time,
    extract_echoes,
    propagate,
)
from .spectral import (
    AbsorptionProfile,
    CombSpec,
    FrequencyGrid,
    ToothShape,
    TransferFunction,
    build_comb,
    causal_phase,
    compose,
    to_transfer_function,
)

__version__ = "0.1.0"
