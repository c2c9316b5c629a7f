"""CCSK demodulation by frequency-domain correlation and real-part detection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectrum import ClusterPartition
from .waveform import PhaseVector, SymbolVector, check_m_order, cluster_spectra


@dataclass(frozen=True, eq=False)
class CorrelationOutput:
    values: np.ndarray  # (..., L, N)
    detected_symbols: np.ndarray  # (..., L)


def correlate_spectrum(received_freq: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """IDFT{R . conj(reference)}; broadcasts over leading axes."""
    return np.fft.ifft(received_freq * np.conj(reference), axis=-1)


def correlate(received_body: np.ndarray, cluster, phase: PhaseVector) -> np.ndarray:
    reference = np.zeros(phase.n_bins, dtype=complex)
    cluster = np.asarray(cluster, dtype=int)
    reference[cluster] = phase.phases[cluster]
    return correlate_spectrum(np.fft.fft(received_body, axis=-1), reference)


def detect(correlation: np.ndarray, m_order: int) -> np.ndarray:
    """Argmax of Re{y} over the M candidate delays tau = S N / M.

    np.argmax returns the first maximum, so ties go to the smallest symbol.
    """
    n_bins = correlation.shape[-1]
    check_m_order(n_bins, m_order)
    candidates = correlation.real[..., :: n_bins // m_order]
    detected = np.argmax(candidates, axis=-1)
    return int(detected) if np.ndim(detected) == 0 else detected


def correlate_frames(
    received_freq: np.ndarray, partition: ClusterPartition, phase: PhaseVector, m_order: int
) -> CorrelationOutput:
    """All-cluster correlation of F x N received spectra."""
    references = cluster_spectra(partition, phase)
    values = correlate_spectrum(received_freq[..., None, :], references)
    return CorrelationOutput(values=values, detected_symbols=detect(values, m_order))


def demodulate_spectra(
    received_freq: np.ndarray, partition: ClusterPartition, phase: PhaseVector, m_order: int
) -> np.ndarray:
    """F x L detected symbols from F x N received spectra."""
    return np.asarray(correlate_frames(received_freq, partition, phase, m_order).detected_symbols)


def demodulate_frames(
    received_bodies: np.ndarray, partition: ClusterPartition, phase: PhaseVector, m_order: int
) -> np.ndarray:
    return demodulate_spectra(np.fft.fft(received_bodies, axis=-1), partition, phase, m_order)


def demodulate_frame(
    received_body: np.ndarray, partition: ClusterPartition, phase: PhaseVector, m_order: int
) -> SymbolVector:
    symbols = demodulate_frames(np.asarray(received_body)[None, :], partition, phase, m_order)[0]
    return SymbolVector(symbols=symbols, m_order=m_order)
