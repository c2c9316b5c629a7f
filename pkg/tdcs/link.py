"""One Monte-Carlo point of the TDCS link: data -> CCSK -> channel -> detector.

Frames are processed in batches. Batch b of a point draws all of its
randomness from SeedSequence(seed, spawn_key=key + (b,)), so a point is
reproducible and rerunning it with a larger frame budget only extends it.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .channel import (
    ChannelProfile,
    WaveformFrame,
    add_awgn,
    add_cp,
    apply_multipath,
    draw_realization,
    ebn0_to_noise_variance,
    mmse_equalize,
    remove_cp,
)
from .coding import (
    BitInterleaver,
    CodeConfig,
    ConvolutionalCode,
    bits_per_symbol,
    map_bits_to_symbols,
    map_symbols_to_bits,
    message_length,
)
from .config import SimConfig
from .errors import ConfigError
from .receiver import demodulate_spectra
from .spectrum import AvailabilityVector, ClusterPartition, estimate_beta_min, partition_continuous
from .waveform import (
    MSequencePhaseSource,
    PhaseVector,
    UniformPhaseSource,
    energy_normalization,
    generate_phase_vector,
    modulate_frames,
)

logger = logging.getLogger(__name__)

# Bound on F * L * N complex correlator outputs held at once.
_CORRELATOR_BUDGET = 1 << 21


@dataclass(frozen=True, eq=False)
class LinkSetup:
    partition: ClusterPartition
    phase: PhaseVector
    m_order: int
    profile: Optional[ChannelProfile] = None  # None means AWGN
    sample_rate_hz: float = 10e6
    code: Optional[CodeConfig] = None
    frames_per_block: int = 32

    @property
    def n_bins(self) -> int:
        return self.partition.n_bins

    @property
    def n_clusters(self) -> int:
        return self.partition.n_clusters

    @property
    def info_bits_per_block(self) -> int:
        if self.code is None:
            raise ConfigError("uncoded links have no coded block")
        return message_length(self.frames_per_block, self.n_clusters, self.m_order, self.code.constraint_length)

    @property
    def info_bits_per_frame(self) -> float:
        if self.code is None:
            return float(self.n_clusters * bits_per_symbol(self.m_order))
        return self.info_bits_per_block / self.frames_per_block


@dataclass
class PointCounts:
    frames: int = 0
    bits: int = 0
    bit_errors: int = 0
    symbol_errors: int = 0
    symbols: int = 0


def design_partition(config: SimConfig, avail: AvailabilityVector, n_clusters: int) -> ClusterPartition:
    """Continuous split, or the best of config.partition_trials repaired random draws."""
    if config.scheme == "continuous":
        return partition_continuous(avail, n_clusters)
    _, partition = estimate_beta_min(
        avail,
        n_clusters,
        trials=config.partition_trials,
        seed=config.seed,
        workers=config.workers,
        m_order=config.modulation_order,
    )
    return partition


def build_phase(config: SimConfig) -> PhaseVector:
    source = MSequencePhaseSource() if config.phase_source == "msequence" else UniformPhaseSource()
    return generate_phase_vector(config.phase_seed, config.n_bins, source)


def build_link(config: SimConfig, avail: AvailabilityVector, n_clusters: int, phase: PhaseVector) -> LinkSetup:
    return LinkSetup(
        partition=design_partition(config, avail, n_clusters),
        phase=phase,
        m_order=config.modulation_order,
        profile=config.profile(),
        sample_rate_hz=config.effective_sample_rate_hz,
        code=config.code,
        frames_per_block=config.frames_per_block,
    )


def transmit_and_detect(
    setup: LinkSetup,
    symbols: np.ndarray,
    noise_variance: float,
    noise_rng: np.random.Generator,
    fading_rng: np.random.Generator,
) -> np.ndarray:
    """F x L transmitted symbols in, F x L detected symbols out."""
    n_bins = setup.n_bins
    frame = WaveformFrame(
        samples=modulate_frames(setup.partition, setup.phase, symbols, setup.m_order), has_cp=False, n_bins=n_bins
    )
    if setup.profile is None:
        received = np.fft.fft(add_awgn(frame, noise_variance, noise_rng).samples, axis=-1)
    else:
        realization = draw_realization(setup.profile, setup.sample_rate_hz, fading_rng, n_bins, count=symbols.shape[0])
        faded = apply_multipath(add_cp(frame), realization)
        body = remove_cp(add_awgn(faded, noise_variance, noise_rng)).samples
        lam = energy_normalization(n_bins, setup.partition.n_unoccupied)
        # DFT noise is N * sigma^2 per bin, occupied-bin signal power is lambda^2
        received = mmse_equalize(np.fft.fft(body, axis=-1), realization, n_bins * noise_variance, lam ** 2)
    return demodulate_spectra(received, setup.partition, setup.phase, setup.m_order)


def _batch_rngs(seed: int, key: Tuple[int, ...], batch: int):
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed, spawn_key=key + (batch,)).spawn(3)]


def _symbol_bit_errors(sent: np.ndarray, detected: np.ndarray, setup: LinkSetup) -> int:
    diff = np.bitwise_xor(sent, detected)
    return int(map_symbols_to_bits(diff, setup.n_clusters, setup.m_order).sum())


def simulate_point(
    setup: LinkSetup,
    ebn0_db: float,
    seed: int,
    key: Tuple[int, ...] = (),
    max_frames: int = 10_000,
    min_bit_errors: int = 200,
    batch_frames: int = 64,
) -> PointCounts:
    """Simulate frames at one Eb/N0 until min_bit_errors or max_frames is hit."""
    noise_variance = ebn0_to_noise_variance(ebn0_db, setup.info_bits_per_frame, 1.0)
    counts = PointCounts()
    if setup.code is None:
        step = max(1, min(batch_frames, _CORRELATOR_BUDGET // (setup.n_clusters * setup.n_bins)))
        run_batch = _uncoded_batch
    else:
        step = setup.frames_per_block
        run_batch = _coded_batch(setup)

    batch = 0
    while counts.frames < max_frames and counts.bit_errors < min_bit_errors:
        n_frames = min(step, max_frames - counts.frames) if setup.code is None else step
        data_rng, noise_rng, fading_rng = _batch_rngs(seed, key, batch)
        run_batch(setup, n_frames, noise_variance, data_rng, noise_rng, fading_rng, counts)
        batch += 1
    logger.debug(
        "point L=%d Eb/N0=%s dB: %d frames, %d/%d bit errors",
        setup.n_clusters, ebn0_db, counts.frames, counts.bit_errors, counts.bits,
    )
    return counts


def _uncoded_batch(setup, n_frames, noise_variance, data_rng, noise_rng, fading_rng, counts: PointCounts):
    sent = data_rng.integers(0, setup.m_order, (n_frames, setup.n_clusters))
    detected = transmit_and_detect(setup, sent, noise_variance, noise_rng, fading_rng)
    counts.frames += n_frames
    counts.symbols += sent.size
    counts.symbol_errors += int(np.count_nonzero(detected != sent))
    counts.bits += sent.size * bits_per_symbol(setup.m_order)
    counts.bit_errors += _symbol_bit_errors(sent, detected, setup)


def _coded_batch(setup: LinkSetup):
    code = ConvolutionalCode(setup.code)
    n_info = setup.info_bits_per_block
    interleaver = BitInterleaver(2 * (n_info + code.tail_length), setup.code.interleaver_seed)

    def run(setup, n_frames, noise_variance, data_rng, noise_rng, fading_rng, counts: PointCounts):
        message = data_rng.integers(0, 2, n_info)
        coded = interleaver.interleave(code.encode(message))
        sent = map_bits_to_symbols(coded, setup.n_clusters, setup.m_order)
        detected = transmit_and_detect(setup, sent, noise_variance, noise_rng, fading_rng)
        hard = map_symbols_to_bits(detected, setup.n_clusters, setup.m_order)
        decoded = code.viterbi_decode(interleaver.deinterleave(hard))
        counts.frames += sent.shape[0]
        counts.symbols += sent.size
        counts.symbol_errors += int(np.count_nonzero(detected != sent))
        counts.bits += n_info
        counts.bit_errors += int(np.count_nonzero(decoded != message))

    return run
