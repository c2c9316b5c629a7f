"""AWGN and block-fading multipath channels with cyclic-prefix handling.

Every operation works on the last axis, so a batch of frames is an F x n
array carried by a single WaveformFrame and a batch of realizations holds one
tap vector per frame.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np

from .errors import ChannelError

logger = logging.getLogger(__name__)

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator, None]


@dataclass(frozen=True, eq=False)
class WaveformFrame:
    samples: np.ndarray
    has_cp: bool
    n_bins: int

    def __post_init__(self):
        expected = self.n_bins + self.cp_length if self.has_cp else self.n_bins
        if self.samples.shape[-1] != expected:
            raise ChannelError(f"frame holds {self.samples.shape[-1]} samples, expected {expected}")

    @property
    def cp_length(self) -> int:
        return self.n_bins // 4

    @property
    def body(self) -> np.ndarray:
        return self.samples[..., self.cp_length:] if self.has_cp else self.samples

    def energy(self) -> np.ndarray:
        return np.sum(np.abs(self.body) ** 2, axis=-1)


@dataclass(frozen=True)
class ChannelProfile:
    name: str
    tap_delays_us: Tuple[float, ...]
    tap_powers_db: Tuple[float, ...]

    def __post_init__(self):
        if len(self.tap_delays_us) != len(self.tap_powers_db) or not self.tap_delays_us:
            raise ChannelError(f"profile {self.name!r} needs one power per delay")
        if min(self.tap_delays_us) < 0:
            raise ChannelError(f"profile {self.name!r} has a negative delay")

    def linear_powers(self) -> np.ndarray:
        powers = 10.0 ** (np.asarray(self.tap_powers_db) / 10.0)
        return powers / powers.sum()

    def delay_samples(self, sample_rate_hz: float) -> np.ndarray:
        return np.rint(np.asarray(self.tap_delays_us) * 1e-6 * sample_rate_hz).astype(int)


COST207_RAX6 = ChannelProfile(
    name="COST207-RAx6",
    tap_delays_us=(0.0, 0.1, 0.2, 0.3, 0.4, 0.5),
    tap_powers_db=(0.0, -4.0, -8.0, -12.0, -16.0, -20.0),
)


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    taps: np.ndarray  # (..., memory + 1), sample spaced
    freq_response: np.ndarray  # (..., N)

    @property
    def memory(self) -> int:
        return self.taps.shape[-1] - 1


def add_awgn(frame: WaveformFrame, noise_variance: float, seed: SeedLike = None) -> WaveformFrame:
    """Circularly-symmetric complex Gaussian noise, variance noise_variance per sample."""
    if noise_variance < 0:
        raise ChannelError(f"noise variance must be non-negative, got {noise_variance}")
    if noise_variance == 0:
        return WaveformFrame(samples=frame.samples.copy(), has_cp=frame.has_cp, n_bins=frame.n_bins)
    rng = np.random.default_rng(seed)
    shape = frame.samples.shape
    noise = np.sqrt(noise_variance / 2) * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    return WaveformFrame(samples=frame.samples + noise, has_cp=frame.has_cp, n_bins=frame.n_bins)


def ebn0_to_noise_variance(
    ebn0_db: float,
    info_bits_per_frame: float,
    frame_energy: float = 1.0,
    frame_length_samples: Optional[int] = None,
) -> float:
    """Per-sample noise variance: frame_energy / (info_bits_per_frame * 10^(ebn0_db / 10)).

    Eb is measured on the frame body; when a prefix is present the same
    per-sample variance is injected over it too, so the prefix energy is not
    charged to Eb.
    """
    if info_bits_per_frame <= 0:
        raise ChannelError(f"info bits per frame must be positive, got {info_bits_per_frame}")
    if frame_length_samples is not None and frame_length_samples <= 0:
        raise ChannelError(f"frame length must be positive, got {frame_length_samples}")
    eb = frame_energy / info_bits_per_frame
    return float(eb / np.power(10.0, ebn0_db / 10.0))


def add_cp(frame: WaveformFrame) -> WaveformFrame:
    if frame.has_cp:
        raise ChannelError("frame already carries a cyclic prefix")
    if frame.n_bins % 4:
        raise ChannelError(f"N={frame.n_bins} is not divisible by 4")
    prefix = frame.samples[..., frame.n_bins - frame.cp_length:]
    return WaveformFrame(
        samples=np.concatenate([prefix, frame.samples], axis=-1), has_cp=True, n_bins=frame.n_bins
    )


def remove_cp(frame: WaveformFrame) -> WaveformFrame:
    if not frame.has_cp:
        raise ChannelError("frame has no cyclic prefix to remove")
    return WaveformFrame(samples=frame.body.copy(), has_cp=False, n_bins=frame.n_bins)


def draw_realization(
    profile: ChannelProfile,
    sample_rate_hz: float,
    seed: SeedLike,
    n_bins: int,
    count: Optional[int] = None,
) -> ChannelRealization:
    """Rayleigh taps with the profile's normalized powers, one set per frame.

    Delays are rounded to the nearest sample; paths landing on the same
    sample add up. With `count` the realization carries a leading batch axis.
    """
    delays = profile.delay_samples(sample_rate_hz)
    cp_length = n_bins // 4
    if delays.max() >= cp_length:
        raise ChannelError(
            f"CP too short: {profile.name} delay reaches {delays.max()} samples, CP holds {cp_length}"
        )
    rng = np.random.default_rng(seed)
    shape = (len(delays),) if count is None else (count, len(delays))
    paths = np.sqrt(profile.linear_powers() / 2) * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))

    taps = np.zeros(shape[:-1] + (delays.max() + 1,), dtype=complex)
    for i, d in enumerate(delays):
        taps[..., d] += paths[..., i]
    return ChannelRealization(taps=taps, freq_response=np.fft.fft(taps, n=n_bins, axis=-1))


def flat_realization(n_bins: int, gain: complex = 1.0) -> ChannelRealization:
    taps = np.array([gain], dtype=complex)
    return ChannelRealization(taps=taps, freq_response=np.fft.fft(taps, n=n_bins))


def apply_multipath(frame: WaveformFrame, realization: ChannelRealization) -> WaveformFrame:
    """Linear convolution with the taps, truncated to the frame length."""
    if not frame.has_cp:
        raise ChannelError("multipath needs a CP-extended frame")
    if realization.memory >= frame.cp_length:
        raise ChannelError(f"CP too short: channel memory {realization.memory} is not below {frame.cp_length}")
    x = frame.samples
    n = x.shape[-1]
    taps = realization.taps
    y = np.zeros(np.broadcast_shapes(x.shape, taps.shape[:-1] + (n,)), dtype=complex)
    for d in range(taps.shape[-1]):
        y[..., d:] += taps[..., d:d + 1] * x[..., :n - d]
    return WaveformFrame(samples=y, has_cp=True, n_bins=frame.n_bins)


def mmse_equalize(
    received_freq: np.ndarray,
    realization: ChannelRealization,
    noise_variance: float,
    signal_power: float = 1.0,
) -> np.ndarray:
    """One-tap MMSE: conj(H_k) / (|H_k|^2 + noise_variance / signal_power) per bin.

    Both variances are per frequency bin, in the same transform domain as
    `received_freq`.
    """
    h = realization.freq_response
    denom = np.abs(h) ** 2 + noise_variance / signal_power
    gain = np.divide(np.conj(h), denom, out=np.zeros_like(h, dtype=complex), where=denom > 0)
    return received_freq * gain


def parse_profile(text: str) -> ChannelProfile:
    lines = [line.split("#", 1)[0].strip() for line in text.splitlines()]
    lines = [line for line in lines if line]
    if len(lines) < 2:
        raise ChannelError("profile needs a name line and at least one tap")
    delays, powers = [], []
    for line in lines[1:]:
        try:
            delay, power = (float(tok) for tok in line.split())
        except ValueError as exc:
            raise ChannelError(f"malformed tap line {line!r}: expected 'delay_us power_db'") from exc
        delays.append(delay)
        powers.append(power)
    return ChannelProfile(name=lines[0], tap_delays_us=tuple(delays), tap_powers_db=tuple(powers))


def load_profile(path: Union[str, Path]) -> ChannelProfile:
    return parse_profile(Path(path).read_text())
