from pathlib import Path

import pytest

from afcmap.config import config_from_dict, default_config, load_config

REFERENCE_TOML = Path(__file__).resolve().parent.parent / "configs" / "reference.toml"


class TestDefaults:
    def test_default_config_is_valid(self):
        assert default_config().validate() == []

    def test_reference_file_matches_defaults(self):
        cfg = load_config(REFERENCE_TOML)
        base = default_config()
        assert cfg.validate() == []
        assert cfg.scheme.n_frequency_modes == base.scheme.n_frequency_modes
        assert cfg.source.pulses_per_mode == base.source.pulses_per_mode
        assert cfg.detector.dark_rate_hz == base.detector.dark_rate_hz
        assert [c.peak_depth for c in cfg.combs] == [c.peak_depth for c in base.combs]
        assert cfg.scheme.comb_spacings_hz == pytest.approx(base.scheme.comb_spacings_hz)

    def test_hash_deterministic_and_seed_sensitive(self):
        assert default_config().config_hash() == default_config().config_hash()
        assert default_config(seed=1).config_hash() != default_config().config_hash()


class TestLoading:
    def test_overrides(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text(
            """
seed = 9

[source]
pulses_per_mode = 1234
mean_photon_number = 0.05

[detector]
dark_rate_hz = 10.0
"""
        )
        cfg = load_config(path)
        assert cfg.seed == 9
        assert cfg.source.pulses_per_mode == 1234
        assert cfg.source.mean_photon_number == 0.05
        assert cfg.detector.dark_rate_hz == 10.0
        # untouched sections keep the defaults
        assert cfg.scheme.n_frequency_modes == 3
        assert cfg.combs[0].peak_depth == pytest.approx(3.693831)

    def test_explicit_combs_with_rule_spacings(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text(
            """
[scheme]
n_frequency_modes = 2
n_spatial_modes = 2
temporal_mode_ns = 400.0
mapped_mode_ns = 400.0

[[combs]]
center_offset_hz = -50e6
peak_depth = 1.0

[[combs]]
center_offset_hz = 50e6
peak_depth = 1.5
"""
        )
        cfg = load_config(path)
        assert cfg.scheme.comb_spacings_hz[0] == pytest.approx(1 / (1.5 * 400e-9))
        assert cfg.scheme.comb_spacings_hz[1] == pytest.approx(1 / (2.5 * 400e-9))
        assert cfg.scheme.mode_offsets_hz == (-50e6, 50e6)

    def test_scheme_only_config_autogenerates_combs(self):
        cfg = config_from_dict({"scheme": {"n_frequency_modes": 5, "n_spatial_modes": 5}})
        assert len(cfg.combs) == 5
        assert cfg.scheme.comb_spacings_hz[4] == pytest.approx(1 / (5.5 * 435e-9))

    def test_mu_zero_config(self):
        cfg = config_from_dict({"source": {"mean_photon_number": 0.0}})
        assert cfg.source.mean_photon_number == 0.0

    def test_wrong_comb_count(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text(
            """
[scheme]
n_frequency_modes = 2

[[combs]]
center_offset_hz = 0.0
"""
        )
        with pytest.raises(ValueError, match="combs"):
            load_config(path)

    def test_invalid_toml(self, tmp_path):
        path = tmp_path / "broken.toml"
        path.write_text("[grid\nresolution_hz = ")
        with pytest.raises(ValueError, match="TOML"):
            load_config(path)

    def test_missing_offset(self):
        with pytest.raises(ValueError, match="center_offset_hz"):
            config_from_dict({"combs": [{"peak_depth": 1.0}, {}, {}]})


class TestCrossValidation:
    def test_off_rule_spacing_flagged(self):
        cfg = config_from_dict(
            {
                "combs": [
                    {"center_offset_hz": -100e6, "comb_spacing_hz": 2e6},
                    {"center_offset_hz": 0.0},
                    {"center_offset_hz": 100e6},
                ]
            }
        )
        assert any("window-centering rule" in p for p in cfg.validate())

    def test_unresolved_tooth_flagged(self):
        cfg = config_from_dict({"grid": {"resolution_hz": 200e3, "sample_count": 16384}})
        assert any("resolve" in p for p in cfg.validate())

    def test_wide_pulse_flagged(self):
        cfg = config_from_dict({"source": {"spectral_fwhm_hz": 100e6}})
        assert any("mode spacing" in p for p in cfg.validate())
