import sys

import pytest

from afcmap.spectral import CombSpec, FrequencyGrid


@pytest.fixture(scope="session")
def fine_grid() -> FrequencyGrid:
    """102.4 MHz span, 12.5 kHz resolution: resolves F<=6 teeth of MHz combs."""
    return FrequencyGrid(resolution_hz=12.5e3, sample_count=1 << 13)


@pytest.fixture(scope="session")
def std_comb() -> CombSpec:
    return CombSpec(
        center_offset_hz=0.0,
        comb_spacing_hz=1.0e6,
        finesse=3.0,
        peak_depth=2.0,
        background_depth=0.1,
        comb_bandwidth_hz=40e6,
    )


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one pass/fail line per acceptance criterion, when they ran."""
    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if module is None:
        return
    results = getattr(module, "RESULTS", [])
    if not results:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name, status in results:
        terminalreporter.write_line(f"{status}: {name}")
