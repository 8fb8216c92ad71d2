import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from afcmap.mapping import (
    Classification,
    ModeAssignment,
    SchemeConfig,
    decode,
    encode,
    roundtrip_check,
    validate,
)

NS = 1e-9


def scheme(n_f=3, n_s=3, dt=435 * NS, dtp=435 * NS) -> SchemeConfig:
    return SchemeConfig.with_centered_echoes(n_f, n_s, dt, dtp)


def schemes_with_ratio():
    def build(n_f, n_s, dt, ratio):
        return SchemeConfig.with_centered_echoes(n_f, n_s, dt, dt * ratio)

    return st.builds(
        build,
        n_f=st.integers(1, 8),
        n_s=st.integers(1, 8),
        dt=st.floats(100 * NS, 1000 * NS),
        ratio=st.sampled_from([1.0, 1.5, 2.0]),
    ).filter(lambda c: not validate(c))


class TestSchemeConfig:
    def test_centered_rule_reproduces_reference_spacings(self):
        config = scheme()
        mhz = [s / 1e6 for s in config.comb_spacings_hz]
        assert mhz[0] == pytest.approx(1.533, abs=5e-4)
        assert mhz[1] == pytest.approx(0.920, abs=5e-4)
        assert mhz[2] == pytest.approx(0.657, abs=5e-4)

    def test_rejects_bad_counts(self):
        with pytest.raises(ValueError):
            SchemeConfig(0, 3, 435 * NS, 435 * NS, (), ())
        with pytest.raises(ValueError):
            SchemeConfig(2, 3, 435 * NS, 435 * NS, (0.0,), (1e6, 2e6))

    def test_mode_assignment_round_robin(self):
        config = scheme()
        assignment = ModeAssignment.from_arrival(config, temporal_mode=4, frequency_mode=2)
        assert assignment.spatial_channel == 1


class TestValidate:
    def test_reference_configuration_feasible(self):
        assert validate(scheme()) == []

    def test_too_many_frequency_modes(self):
        bad = scheme(n_f=4)
        violations = validate(bad)
        assert len(violations) == 1
        assert violations[0].name == "windows_fit_channel_cycle"
        assert violations[0].slack == pytest.approx(-435 * NS)

    def test_temporal_exceeds_mapped(self):
        bad = scheme(dt=500 * NS, dtp=435 * NS)
        names = {v.name for v in validate(bad)}
        assert "temporal_within_mapped" in names


class TestEncode:
    def test_first_mode_window_center(self):
        assert encode(scheme(), 0, 1) == (0, pytest.approx(652.5 * NS))

    def test_second_temporal_mode(self):
        channel, time = encode(scheme(), 1, 2)
        assert channel == 1
        assert time == pytest.approx((435 + 1087.5) * NS)

    def test_round_robin_wrap(self):
        channel, time = encode(scheme(), 3, 1)
        assert channel == 0
        assert time == pytest.approx((3 * 435 + 652.5) * NS)

    def test_rejects_out_of_range_mode(self):
        with pytest.raises(ValueError):
            encode(scheme(), 0, 4)
        with pytest.raises(ValueError):
            encode(scheme(), 0, 0)


class TestDecode:
    def test_identified_first_echo(self):
        result = decode(scheme(), 0, 652 * NS)
        assert result.classification is Classification.IDENTIFIED
        assert (result.temporal_mode, result.frequency_mode) == (0, 1)

    def test_identified_second_mode(self):
        result = decode(scheme(), 1, 1522 * NS)
        assert result.classification is Classification.IDENTIFIED
        assert (result.temporal_mode, result.frequency_mode) == (1, 2)

    def test_transmitted_window(self):
        result = decode(scheme(), 0, 100 * NS)
        assert result.classification is Classification.TRANSMITTED
        assert result.temporal_mode == 0
        assert result.frequency_mode is None

    def test_ambiguous_with_later_window0(self):
        # (j=0, k=3) occupies [1305, 1740) ns on channel 0, which is also
        # window 0 of temporal mode 3: the echo reading is kept but flagged.
        result = decode(scheme(), 0, 1522 * NS)
        assert result.classification is Classification.AMBIGUOUS_WINDOW0
        assert (result.temporal_mode, result.frequency_mode) == (0, 3)

    def test_out_of_range(self):
        config = scheme()
        assert decode(config, 2, 100 * NS).classification is Classification.OUT_OF_RANGE
        assert decode(config, 0, -5 * NS).classification is Classification.OUT_OF_RANGE

    def test_rejects_infeasible_config(self):
        with pytest.raises(ValueError, match="infeasible"):
            decode(scheme(n_f=4), 0, 652 * NS)

    def test_rejects_bad_channel(self):
        with pytest.raises(ValueError, match="channel"):
            decode(scheme(), 3, 652 * NS)


class TestRoundtrip:
    def test_reference_config(self):
        assert roundtrip_check(scheme(), max_temporal_mode=30) is None

    def test_spread_windows(self):
        config = SchemeConfig.with_centered_echoes(2, 5, 200 * NS, 400 * NS)
        assert roundtrip_check(config, max_temporal_mode=50) is None

    def test_broken_config_collides(self):
        # N_F * dt' > N_S * dt: overlapping windows must produce a collision.
        broken = scheme(n_f=3, n_s=2)
        assert validate(broken)
        counterexample = roundtrip_check(broken, max_temporal_mode=30, check_valid=False)
        assert counterexample is not None
        decoded = counterexample.decoded
        assert (decoded.temporal_mode, decoded.frequency_mode) != (
            counterexample.temporal_mode,
            counterexample.frequency_mode,
        )


class TestProperties:
    @settings(max_examples=80, deadline=None)
    @given(config=schemes_with_ratio())
    def test_roundtrip_identity(self, config):
        assert roundtrip_check(config, max_temporal_mode=3 * config.n_spatial_modes) is None

    @settings(max_examples=50, deadline=None)
    @given(config=schemes_with_ratio(), cycles=st.integers(1, 4))
    def test_channel_balance(self, config, cycles):
        counts = [0] * config.n_spatial_modes
        for j in range(cycles * config.n_spatial_modes):
            counts[j % config.n_spatial_modes] += 1
        assert all(c == cycles for c in counts)

    @settings(max_examples=50, deadline=None)
    @given(config=schemes_with_ratio())
    def test_windows_disjoint_per_channel(self, config):
        windows = []
        for j in range(0, 4 * config.n_spatial_modes, config.n_spatial_modes):
            for k in range(1, config.n_frequency_modes + 1):
                start = j * config.temporal_mode_s + k * config.mapped_mode_s
                windows.append((start, start + config.mapped_mode_s))
        windows.sort()
        for (s1, e1), (s2, _) in zip(windows, windows[1:]):
            assert e1 <= s2 + 1e-15

    @settings(max_examples=80, deadline=None)
    @given(
        config=schemes_with_ratio(),
        time=st.floats(-1e-6, 30e-6),
        channel_seed=st.integers(0, 7),
    )
    def test_decode_total(self, config, time, channel_seed):
        channel = channel_seed % config.n_spatial_modes
        result = decode(config, channel, time)
        assert isinstance(result.classification, Classification)
        if result.classification is Classification.IDENTIFIED:
            # identified results satisfy the encode window arithmetic
            j, k = result.temporal_mode, result.frequency_mode
            assert j % config.n_spatial_modes == channel
            start = j * config.temporal_mode_s + k * config.mapped_mode_s
            assert start <= time < start + config.mapped_mode_s
