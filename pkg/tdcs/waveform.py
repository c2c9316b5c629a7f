"""Phase vectors, fundamental modulation waveforms and multi-cluster CCSK.

Transform convention: the forward DFT is unscaled and the inverse carries
1/N (numpy's default), so with lambda = sqrt(N / N_C) every frame has unit
energy.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Protocol, Sequence, Union

import numpy as np
from scipy.signal import max_len_seq

from .channel import WaveformFrame
from .errors import WaveformError
from .spectrum import ClusterPartition, SeedLike

logger = logging.getLogger(__name__)


class PhaseSource(Protocol):
    def draw(self, seed: SeedLike, n_bins: int) -> np.ndarray:
        """Return n_bins phase angles m_k in [0, 2 pi)."""
        ...


class UniformPhaseSource:
    """Continuous phases drawn uniformly from [0, 2 pi)."""

    def draw(self, seed: SeedLike, n_bins: int) -> np.ndarray:
        return np.random.default_rng(seed).uniform(0.0, 2 * np.pi, n_bins)


class MSequencePhaseSource:
    """2^r-PSK phases built from consecutive r-bit groups of a binary m-sequence.

    The seed picks the (non-zero) initial LFSR state, i.e. the cyclic offset.
    """

    def __init__(self, bits_per_phase: int = 3):
        if bits_per_phase < 1:
            raise WaveformError(f"bits_per_phase must be positive, got {bits_per_phase}")
        self.bits_per_phase = bits_per_phase

    def draw(self, seed: SeedLike, n_bins: int) -> np.ndarray:
        r = self.bits_per_phase
        n_needed = n_bins * r
        nbits = max(2, math.ceil(math.log2(n_needed + 1)))
        state = np.random.default_rng(seed).integers(0, 2, nbits)
        if not state.any():
            state[0] = 1
        seq, _ = max_len_seq(nbits, state=state, length=n_needed)
        groups = seq.reshape(n_bins, r).astype(int)
        levels = groups @ (1 << np.arange(r - 1, -1, -1))
        return 2 * np.pi * levels / (1 << r)


@dataclass(frozen=True, eq=False)
class PhaseVector:
    phases: np.ndarray
    seed: int

    @property
    def n_bins(self) -> int:
        return self.phases.size


@dataclass(frozen=True, eq=False)
class Fmw:
    time_samples: np.ndarray
    source_cluster: np.ndarray
    lam: float

    def spectrum(self) -> np.ndarray:
        return np.fft.fft(self.time_samples)


@dataclass(frozen=True, eq=False)
class SymbolVector:
    symbols: np.ndarray
    m_order: int

    def __post_init__(self):
        symbols = np.asarray(self.symbols, dtype=int)
        if symbols.size and (symbols.min() < 0 or symbols.max() >= self.m_order):
            raise WaveformError(f"symbol out of range [0, {self.m_order})")
        object.__setattr__(self, "symbols", symbols)

    def __len__(self) -> int:
        return self.symbols.size


def energy_normalization(n_bins: int, n_unoccupied: int) -> float:
    return math.sqrt(n_bins / n_unoccupied)


def check_m_order(n_bins: int, m_order: int):
    if m_order < 2 or n_bins % m_order:
        raise WaveformError(f"CCSK order M={m_order} must divide N={n_bins}")


def generate_phase_vector(seed: int, n_bins: int, source: Optional[PhaseSource] = None) -> PhaseVector:
    if n_bins < 2:
        raise WaveformError(f"n_bins must be at least 2, got {n_bins}")
    angles = (source or UniformPhaseSource()).draw(seed, n_bins)
    return PhaseVector(phases=np.exp(1j * angles), seed=seed)


def synthesize_fmw(cluster: Sequence[int], phase: PhaseVector, n_bins: int, lam: float) -> Fmw:
    cluster = np.asarray(cluster, dtype=int)
    if cluster.size == 0:
        raise WaveformError("cannot synthesize an FMW from an empty cluster")
    if cluster.min() < 0 or cluster.max() >= n_bins:
        raise WaveformError(f"cluster bins must lie in [0, {n_bins})")
    spectrum = np.zeros(n_bins, dtype=complex)
    spectrum[cluster] = phase.phases[cluster]
    return Fmw(time_samples=lam * np.fft.ifft(spectrum), source_cluster=cluster, lam=lam)


def cluster_spectra(partition: ClusterPartition, phase: PhaseVector) -> np.ndarray:
    """L x N frequency-domain references A^l . P."""
    return partition.masks() * phase.phases


def cluster_owner(partition: ClusterPartition) -> np.ndarray:
    """Cluster index of every bin, -1 on occupied bins."""
    owner = np.full(partition.n_bins, -1)
    for l, cluster in enumerate(partition.clusters):
        owner[cluster] = l
    return owner


def modulate_frames(
    partition: ClusterPartition, phase: PhaseVector, symbols: np.ndarray, m_order: int
) -> np.ndarray:
    """F x N frames, one inverse transform per frame for all L clusters."""
    n_bins = partition.n_bins
    check_m_order(n_bins, m_order)
    symbols = np.atleast_2d(np.asarray(symbols, dtype=int))
    if symbols.shape[-1] != partition.n_clusters:
        raise WaveformError(f"expected {partition.n_clusters} symbols per frame, got {symbols.shape[-1]}")
    if symbols.min() < 0 or symbols.max() >= m_order:
        raise WaveformError(f"symbol out of range [0, {m_order})")

    lam = energy_normalization(n_bins, partition.n_unoccupied)
    owner = cluster_owner(partition)
    bins = np.flatnonzero(owner >= 0)
    per_bin = symbols[:, owner[bins]]
    spectrum = np.zeros((symbols.shape[0], n_bins), dtype=complex)
    spectrum[:, bins] = phase.phases[bins] * np.exp(-2j * np.pi * per_bin * bins / m_order)
    return lam * np.fft.ifft(spectrum, axis=-1)


def modulate(partition: ClusterPartition, phase: PhaseVector, symbols: SymbolVector) -> WaveformFrame:
    if len(symbols) != partition.n_clusters:
        raise WaveformError(f"expected {partition.n_clusters} symbols, got {len(symbols)}")
    samples = modulate_frames(partition, phase, symbols.symbols[None, :], symbols.m_order)[0]
    return WaveformFrame(samples=samples, has_cp=False, n_bins=partition.n_bins)


def format_fmw(fmw: Fmw) -> str:
    return "".join(f"{z.real:.17g} {z.imag:.17g}\n" for z in fmw.time_samples)


def save_fmw(fmw: Fmw, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(format_fmw(fmw))
    return path
