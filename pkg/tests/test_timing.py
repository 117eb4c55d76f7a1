import json

import pytest

from dcfkit.timing import (
    GROWTH_BINARY,
    GROWTH_LINEAR,
    BackoffPolicy,
    TimingProfile,
    expected_backoff_slots,
    first_window_time,
    load_profile,
    mean_frame_cycle,
)

US = 1e-6


def test_expected_backoff_slots_examples():
    assert expected_backoff_slots(0) == 0
    assert expected_backoff_slots(15) == 7.5
    assert expected_backoff_slots(1023) == 511.5


def test_expected_backoff_slots_rejects_negative():
    with pytest.raises(ValueError):
        expected_backoff_slots(-1)


def test_expected_backoff_slots_matches_explicit_summation():
    # dense small range plus sparse samples up to 2^16
    windows = list(range(0, 2049)) + list(range(2049, 65537, 997)) + [65536]
    for w in windows:
        explicit = sum(range(w + 1)) / (w + 1)
        assert expected_backoff_slots(w) == explicit


def test_mean_frame_cycle_g_legacy():
    profile = load_profile("g_legacy")
    # 50 + 1440 + 10 + 112 microseconds
    assert mean_frame_cycle(profile) == pytest.approx(1612 * US, rel=1e-12)
    assert profile.ack_duration == pytest.approx(112 * US, rel=1e-12)


def test_mean_frame_cycle_zero_profile():
    profile = TimingProfile(
        t_slot=0, sifs=0, difs=0, ack_bytes=0, ack_rate=1.0, t_p=0, cw_min=0, cw_max=0
    )
    assert mean_frame_cycle(profile) == 0


def test_mean_frame_cycle_without_ack_bytes():
    profile = load_profile("g_legacy").with_overrides(ack_bytes=0)
    expected = profile.difs + profile.t_p + profile.sifs
    assert mean_frame_cycle(profile) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize(
    "variant,t_slot,sifs,difs,cw_min",
    [
        ("b", 20, 10, 50, 31),
        ("a", 9, 16, 34, 15),
        ("g", 9, 10, 28, 15),
        ("g_legacy", 20, 10, 50, 15),
    ],
)
def test_load_profile_preset_table(variant, t_slot, sifs, difs, cw_min):
    profile = load_profile(variant)
    assert profile.t_slot == t_slot * US
    assert profile.sifs == sifs * US
    assert profile.difs == difs * US
    assert profile.ack_bytes == 14
    assert profile.cw_min == cw_min
    assert profile.cw_max == 1023
    assert profile.t_p == 0.00144
    assert profile.t_rt == 0.0


def test_load_profile_unknown_variant():
    with pytest.raises(ValueError, match="unknown 802.11 variant"):
        load_profile("n")


@pytest.mark.parametrize("variant", ["b", "a", "g", "g_legacy"])
def test_profile_serialization_roundtrip(variant):
    profile = load_profile(variant)
    recovered = TimingProfile.from_dict(json.loads(json.dumps(profile.to_dict())))
    assert recovered == profile


def test_profile_validation():
    base = load_profile("g_legacy").to_dict()
    with pytest.raises(ValueError):
        TimingProfile.from_dict({**base, "sifs": -1e-6})
    with pytest.raises(ValueError):
        TimingProfile.from_dict({**base, "ack_rate": 0})
    with pytest.raises(ValueError):
        TimingProfile.from_dict({**base, "cw_min": 2048})


def test_first_window_time_g_legacy():
    assert first_window_time(load_profile("g_legacy")) == pytest.approx(
        150 * US, rel=1e-12
    )


def test_linear_growth_scales_then_caps():
    profile = load_profile("g_legacy")
    policy = BackoffPolicy(max_stage=80, growth=GROWTH_LINEAR)
    for stage in range(1, 69):  # 68 * 15 = 1020 is the last uncapped window
        assert policy.window_of(stage, profile) == stage * 15
    for stage in range(69, 81):
        assert policy.window_of(stage, profile) == 1023


def test_binary_growth_doubles_then_caps():
    profile = load_profile("g_legacy")
    policy = BackoffPolicy(max_stage=9, growth=GROWTH_BINARY)
    windows = [policy.window_of(i, profile) for i in range(1, 10)]
    assert windows == [15, 31, 63, 127, 255, 511, 1023, 1023, 1023]


def test_first_window_is_cw_min_for_both_growths():
    profile = load_profile("b")
    for growth in (GROWTH_LINEAR, GROWTH_BINARY):
        policy = BackoffPolicy(max_stage=4, growth=growth)
        assert policy.window_of(1, profile) == profile.cw_min


def test_windows_nondecreasing():
    profile = load_profile("g_legacy")
    for growth in (GROWTH_LINEAR, GROWTH_BINARY):
        policy = BackoffPolicy(max_stage=20, growth=growth)
        windows = [policy.window_of(i, profile) for i in range(1, 21)]
        assert windows == sorted(windows)
        assert windows[-1] <= profile.cw_max


def test_policy_validation():
    profile = load_profile("g_legacy")
    with pytest.raises(ValueError):
        BackoffPolicy(max_stage=0)
    with pytest.raises(ValueError):
        BackoffPolicy(max_stage=3, growth="fibonacci")
    policy = BackoffPolicy(max_stage=3)
    with pytest.raises(ValueError):
        policy.window_of(0, profile)
    with pytest.raises(ValueError):
        policy.window_of(4, profile)


def test_mean_backoff_time():
    profile = load_profile("g_legacy")
    policy = BackoffPolicy(max_stage=6)
    # stage 2: window 30 slots, mean 15 slots of 20us
    assert policy.mean_backoff_time(2, profile) == pytest.approx(300 * US, rel=1e-12)
