from pathlib import Path

import numpy as np
import pytest

from tdcs.channel import (
    COST207_RAX6,
    ChannelProfile,
    ChannelRealization,
    WaveformFrame,
    add_awgn,
    add_cp,
    apply_multipath,
    draw_realization,
    ebn0_to_noise_variance,
    flat_realization,
    load_profile,
    mmse_equalize,
    parse_profile,
    remove_cp,
)
from tdcs.errors import ChannelError

PROFILES = Path(__file__).resolve().parent.parent / "profiles"


def _random_frame(rng, n_bins=64, count=None):
    shape = (n_bins,) if count is None else (count, n_bins)
    samples = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return WaveformFrame(samples=samples, has_cp=False, n_bins=n_bins)


def test_awgn_variance():
    frame = WaveformFrame(samples=np.zeros((1000, 1000), dtype=complex), has_cp=False, n_bins=1000)
    noise = add_awgn(frame, 0.5, seed=0).samples
    assert np.mean(np.abs(noise) ** 2) == pytest.approx(0.5, rel=0.01)
    assert np.var(noise.real) == pytest.approx(0.25, rel=0.01)
    assert np.var(noise.imag) == pytest.approx(0.25, rel=0.01)


def test_zero_noise_returns_a_copy():
    frame = _random_frame(np.random.default_rng(1))
    out = add_awgn(frame, 0.0, seed=0)
    assert np.array_equal(out.samples, frame.samples)
    assert out.samples is not frame.samples
    with pytest.raises(ChannelError):
        add_awgn(frame, -1.0)


def test_ebn0_calibration():
    assert ebn0_to_noise_variance(0.0, 8) == pytest.approx(1 / 8)
    assert ebn0_to_noise_variance(10.0, 8) == pytest.approx(1 / 80)
    assert ebn0_to_noise_variance(float("inf"), 8) == 0.0
    with pytest.raises(ChannelError):
        ebn0_to_noise_variance(0.0, 0)


def test_cyclic_prefix():
    frame = _random_frame(np.random.default_rng(2))
    extended = add_cp(frame)
    assert extended.samples.shape[-1] == 80
    assert np.array_equal(extended.samples[:16], frame.samples[-16:])
    assert np.array_equal(remove_cp(extended).samples, frame.samples)
    with pytest.raises(ChannelError):
        add_cp(WaveformFrame(samples=np.zeros(18, dtype=complex), has_cp=False, n_bins=18))
    with pytest.raises(ChannelError):
        remove_cp(frame)


def test_prefix_makes_multipath_circular():
    rng = np.random.default_rng(3)
    frame = _random_frame(rng, count=5)
    realization = draw_realization(COST207_RAX6, 10e6, seed=4, n_bins=64, count=5)
    body = remove_cp(apply_multipath(add_cp(frame), realization)).samples
    expected = realization.freq_response * np.fft.fft(frame.samples, axis=-1)
    assert np.allclose(np.fft.fft(body, axis=-1), expected)


def test_realization_power_and_memory():
    realization = draw_realization(COST207_RAX6, 10e6, seed=5, n_bins=256, count=10_000)
    assert realization.memory == 5
    power = np.sum(np.abs(realization.taps) ** 2, axis=-1)
    assert power.mean() == pytest.approx(1.0, rel=0.02)


def test_channel_longer_than_prefix_is_rejected():
    long = ChannelProfile(name="long", tap_delays_us=(0.0, 10.0), tap_powers_db=(0.0, -3.0))
    with pytest.raises(ChannelError, match="CP too short"):
        draw_realization(long, 10e6, seed=0, n_bins=256)


def test_mmse_without_noise_inverts_the_channel():
    rng = np.random.default_rng(6)
    x = np.fft.fft(_random_frame(rng).samples)
    realization = flat_realization(64, gain=2 - 1j)
    assert np.allclose(mmse_equalize(realization.freq_response * x, realization, 0.0), x)

    faded = draw_realization(COST207_RAX6, 10e6, seed=7, n_bins=64)
    assert np.allclose(mmse_equalize(faded.freq_response * x, faded, 0.0), x)


def test_mmse_shrinks_with_noise():
    realization = flat_realization(8, gain=1.0)
    out = mmse_equalize(np.ones(8, dtype=complex), realization, noise_variance=1.0, signal_power=1.0)
    assert np.allclose(out, 0.5)


def test_profile_file_matches_builtin():
    assert load_profile(PROFILES / "cost207_rax6.txt") == COST207_RAX6
    assert np.isclose(COST207_RAX6.linear_powers().sum(), 1.0)
    with pytest.raises(ChannelError, match="malformed tap line"):
        parse_profile("bad\n0.0 0.0 extra\n")


def test_delay_equal_to_prefix_is_rejected():
    # 1.6 us at 10 MHz is 16 samples, the whole CP of a 64-bin frame
    edge = ChannelProfile(name="edge", tap_delays_us=(0.0, 1.6), tap_powers_db=(0.0, -3.0))
    with pytest.raises(ChannelError, match="CP too short"):
        draw_realization(edge, 10e6, seed=0, n_bins=64)
    assert draw_realization(edge, 10e6, seed=0, n_bins=68).memory == 16

    frame = add_cp(_random_frame(np.random.default_rng(8)))
    realization = ChannelRealization(taps=np.ones(17, dtype=complex), freq_response=np.ones(64, dtype=complex))
    with pytest.raises(ChannelError, match="CP too short"):
        apply_multipath(frame, realization)
