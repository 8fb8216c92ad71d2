import json

import numpy as np
import pytest

from afcmap.analysis import read_histogram_csv, read_report
from afcmap.cli import main
from afcmap.config import default_config
from afcmap.detection import read_events
from afcmap.propagation import read_trace
from afcmap.spectral import read_profile

SIM_FILES = [
    "events.txt",
    "report.json",
    "manifest.json",
    "absorption_profile.txt",
    "histogram_mode1.csv",
    "histogram_mode2.csv",
    "histogram_mode3.csv",
    "trace_mode1.txt",
    "trace_mode2.txt",
    "trace_mode3.txt",
]


def simulate(out, *extra):
    return main(["simulate", "--out", str(out), "--trials", "1500", "--seed", "3", *extra])


class TestSimulate:
    def test_writes_all_outputs(self, tmp_path):
        out = tmp_path / "run"
        assert simulate(out) == 0
        for name in SIM_FILES:
            assert (out / name).exists(), name
        records = read_events(out / "events.txt")
        assert records
        report = read_report(out / "report.json")
        assert len(report.modes) == 3
        read_profile(out / "absorption_profile.txt")
        read_trace(out / "trace_mode1.txt")
        edges, counts = read_histogram_csv(out / "histogram_mode1.csv")
        assert counts.sum() > 0
        assert edges[1] - edges[0] == pytest.approx(4.096e-9)

    def test_manifest_reproducibility_fields(self, tmp_path):
        out = tmp_path / "run"
        simulate(out)
        manifest = json.loads((out / "manifest.json").read_text())
        from dataclasses import replace

        cfg = default_config(seed=3)
        cfg = replace(cfg, source=replace(cfg.source, pulses_per_mode=1500))
        assert manifest["config_hash"] == cfg.config_hash()
        assert manifest["seed"] == 3
        assert manifest["tool_version"] == "0.1.0"
        assert set(manifest["outputs"]) == set(SIM_FILES)

    def test_same_seed_byte_identical_events(self, tmp_path):
        simulate(tmp_path / "a")
        simulate(tmp_path / "b")
        assert (tmp_path / "a/events.txt").read_bytes() == (tmp_path / "b/events.txt").read_bytes()

    def test_different_seed_differs(self, tmp_path):
        simulate(tmp_path / "a")
        main(["simulate", "--out", str(tmp_path / "c"), "--trials", "1500", "--seed", "4"])
        assert (tmp_path / "a/events.txt").read_bytes() != (tmp_path / "c/events.txt").read_bytes()

    def test_refuses_overwrite(self, tmp_path):
        out = tmp_path / "run"
        simulate(out)
        with pytest.raises(SystemExit) as excinfo:
            simulate(out)
        assert excinfo.value.code == 1
        assert simulate(out, "--overwrite") == 0

    def test_mu_zero_empty_events_zero_report(self, tmp_path):
        out = tmp_path / "off"
        assert main(["simulate", "--out", str(out), "--trials", "500", "--mu", "0"]) == 0
        assert (out / "events.txt").read_text() == "# events v1\n"
        report = read_report(out / "report.json")
        assert all(m.eta_echo == 0.0 and m.eta_error == 0.0 for m in report.modes)

    def test_invalid_config_exits_nonzero(self, tmp_path, capsys):
        bad = tmp_path / "bad.toml"
        bad.write_text(
            """
[[combs]]
center_offset_hz = -100e6
comb_spacing_hz = 2e6

[[combs]]
center_offset_hz = 0.0

[[combs]]
center_offset_hz = 100e6
"""
        )
        with pytest.raises(SystemExit) as excinfo:
            main(["simulate", "--config", str(bad), "--out", str(tmp_path / "x"),
                  "--trials", "100"])
        assert excinfo.value.code == 2
        assert "violation" in capsys.readouterr().err

    def test_force_overrides_validation(self, tmp_path):
        bad = tmp_path / "bad.toml"
        bad.write_text(
            """
[[combs]]
center_offset_hz = -100e6
comb_spacing_hz = 1.6e6

[[combs]]
center_offset_hz = 0.0

[[combs]]
center_offset_hz = 100e6
"""
        )
        rc = main(["simulate", "--config", str(bad), "--out", str(tmp_path / "x"),
                   "--trials", "100", "--force"])
        assert rc == 0

    def test_requires_out(self, capsys):
        assert main(["simulate", "--trials", "10"]) == 2
        assert "--out" in capsys.readouterr().err


class TestHistogramStructure:
    def test_peaks_sit_in_their_windows(self, tmp_path):
        out = tmp_path / "run"
        rc = main(["simulate", "--out", str(out), "--trials", "150000", "--seed", "1"])
        assert rc == 0
        echo_ns = (652.5, 1087.5, 1522.5)
        window_edges = [(435, 870), (870, 1305), (1305, 1740)]
        for mode in (1, 2, 3):
            edges, counts = read_histogram_csv(out / f"histogram_mode{mode}.csv")
            centers_ns = (edges[:-1] + np.diff(edges) / 2) * 1e9
            in_window = [
                counts[(centers_ns >= lo) & (centers_ns < hi)].sum()
                for lo, hi in window_edges
            ]
            # dominant mass in the mode's own window, centered on its echo
            others = [c for k, c in enumerate(in_window, start=1) if k != mode]
            assert in_window[mode - 1] > 3 * max(others)
            sel = (centers_ns >= window_edges[mode - 1][0]) & (
                centers_ns < window_edges[mode - 1][1]
            )
            mean_ns = np.average(centers_ns[sel], weights=counts[sel])
            assert abs(mean_ns - echo_ns[mode - 1]) < 40.0

    def test_second_echo_mass_near_1305(self, tmp_path):
        out = tmp_path / "run"
        main(["simulate", "--out", str(out), "--trials", "150000", "--seed", "1"])
        edges, counts = read_histogram_csv(out / "histogram_mode1.csv")
        centers_ns = (edges[:-1] + np.diff(edges) / 2) * 1e9
        near = counts[(centers_ns >= 1250) & (centers_ns < 1360)].sum()
        assert near >= 8  # dark alone would land ~1 count here


class TestAnalyze:
    def test_round_trips_simulate_report(self, tmp_path):
        out = tmp_path / "run"
        simulate(out)
        rc = main(["analyze", str(out / "events.txt"), "--out", str(tmp_path / "re"),
                   "--trials", "1500"])
        assert rc == 0
        original = json.loads((out / "report.json").read_text())
        reanalyzed = json.loads((tmp_path / "re/report.json").read_text())
        assert reanalyzed == original

    def test_hand_written_events(self, tmp_path):
        events = tmp_path / "events.txt"
        events.write_text(
            "# events v1\n"
            "5,0,652.500000,signal\n"     # mode-1 trial, window 1
            "1001,0,1000.000000\n"        # mode-2 trial, window 2
            "2500,0,100.000000,dark\n"    # mode-3 trial, window 0 (uncounted)
        )
        rc = main(["analyze", str(events), "--out", str(tmp_path / "out"),
                   "--trials", "1000"])
        assert rc == 0
        report = read_report(tmp_path / "out/report.json")
        assert report.modes[0].raw_counts == 1
        assert report.modes[1].raw_counts == 1
        assert report.modes[2].raw_counts == 0
        assert report.modes[2].raw_error_counts == 0

    def test_empty_events_zero_report(self, tmp_path):
        events = tmp_path / "events.txt"
        events.write_text("# events v1\n")
        rc = main(["analyze", str(events), "--out", str(tmp_path / "out")])
        assert rc == 0
        report = read_report(tmp_path / "out/report.json")
        assert all(m.raw_counts == 0 for m in report.modes)

    def test_malformed_events_reported(self, tmp_path, capsys):
        events = tmp_path / "events.txt"
        events.write_text("# events v1\n1,0,10.0\ngarbage\n")
        rc = main(["analyze", str(events), "--out", str(tmp_path / "out")])
        assert rc == 2
        assert "line 3" in capsys.readouterr().err


class TestPlan:
    def test_default_plan(self, tmp_path, capsys):
        rc = main(["plan", "--out", str(tmp_path / "plan")])
        assert rc == 0
        stdout = capsys.readouterr().out
        assert "100" in stdout
        assert "feasible" in stdout
        data = json.loads((tmp_path / "plan/plan.json").read_text())
        assert data["max_modes"] == 100
        assert data["violations"] == []

    def test_plan_without_out_prints_only(self, capsys):
        assert main(["plan"]) == 0
        assert "capacity plan" in capsys.readouterr().out

    def test_hundred_mode_scheme_flags_stability(self, tmp_path, capsys):
        cfg = tmp_path / "big.toml"
        cfg.write_text("[scheme]\nn_frequency_modes = 100\nn_spatial_modes = 100\n")
        rc = main(["plan", "--config", str(cfg)])
        assert rc == 0
        stdout = capsys.readouterr().out
        assert "comb_spacing_stability" in stdout
        assert "feasible                  : no" in stdout


class TestSweep:
    def test_single_point(self, tmp_path):
        rc = main(["sweep", "--out", str(tmp_path / "s"), "--depth", "2.5",
                   "--finesse", "3", "--background", "0.1", "--spacing", "1e6"])
        assert rc == 0
        lines = (tmp_path / "s/sweep.csv").read_text().splitlines()
        assert lines[0] == "d,finesse,d0,eta_numeric,eta_analytic"
        assert len(lines) == 2
        d, fin, d0, num, ana = map(float, lines[1].split(","))
        assert (d, fin, d0) == (2.5, 3.0, 0.1)
        assert num == pytest.approx(ana, rel=0.15)

    def test_zero_depth_row(self, tmp_path):
        rc = main(["sweep", "--out", str(tmp_path / "s"), "--depth", "0",
                   "--finesse", "3", "--background", "0.2", "--spacing", "1e6"])
        assert rc == 0
        row = (tmp_path / "s/sweep.csv").read_text().splitlines()[1]
        _, _, _, num, ana = map(float, row.split(","))
        assert ana == 0.0
        assert num < 1e-9

    def test_calibrated_point_recovers_reference_efficiency(self, tmp_path):
        spacing = 1 / (1.5 * 435e-9)
        rc = main(["sweep", "--out", str(tmp_path / "s"), "--depth", "3.693831",
                   "--finesse", "3", "--background", "0", "--spacing", str(spacing),
                   "--pulse-fwhm", "5e6"])
        assert rc == 0
        row = (tmp_path / "s/sweep.csv").read_text().splitlines()[1]
        _, _, _, num, _ = map(float, row.split(","))
        assert num == pytest.approx(0.21, abs=5e-3)

    def test_grid_axes(self, tmp_path):
        rc = main(["sweep", "--out", str(tmp_path / "s"), "--depth", "1:2:2",
                   "--finesse", "2:3:2", "--background", "0", "--spacing", "1e6"])
        assert rc == 0
        lines = (tmp_path / "s/sweep.csv").read_text().splitlines()
        assert len(lines) == 5  # header + 2*2*1 rows

    def test_bad_axis_syntax(self):
        with pytest.raises(SystemExit):
            main(["sweep", "--out", "x", "--depth", "1:2"])
