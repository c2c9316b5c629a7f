"""Rate-1/2 convolutional code, bit interleaver and CCSK bit mapping.

Shift-register convention: the generator's most significant bit taps the
current input, so (171, 133) octal with K=7 is the familiar d_free = 10 code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import CodingError

_UNREACHED = np.iinfo(np.int64).max // 4


@dataclass(frozen=True)
class CodeConfig:
    constraint_length: int = 7
    generator_polynomials: Tuple[int, int] = (0o171, 0o133)
    interleaver_seed: int = 0

    def __post_init__(self):
        k = self.constraint_length
        if k < 2:
            raise CodingError(f"constraint length must be at least 2, got {k}")
        if len(self.generator_polynomials) != 2:
            raise CodingError("a rate-1/2 code needs exactly two generators")
        for g in self.generator_polynomials:
            if not 0 < g < (1 << k):
                raise CodingError(f"generator {g:o} (octal) must be nonzero with degree < {k}")

    @property
    def rate(self) -> float:
        return 0.5


class ConvolutionalCode:
    def __init__(self, config: CodeConfig = CodeConfig()):
        self.config = config
        k = config.constraint_length
        self.n_states = 1 << (k - 1)
        # taps[j, i] multiplies the input delayed by i
        self.taps = np.array(
            [[(g >> (k - 1 - i)) & 1 for i in range(k)] for g in config.generator_polynomials]
        )

        ns = np.arange(self.n_states)
        base = (ns << 1) & (self.n_states - 1)
        self.predecessors = np.stack([base, base | 1], axis=1)
        self.input_bit = ns >> (k - 2)
        register = (self.input_bit[:, None] << (k - 1)) | self.predecessors
        self.branch_outputs = np.stack(
            [_parity(register & g) for g in config.generator_polynomials], axis=-1
        )  # (states, 2 predecessors, 2 outputs)

    @property
    def tail_length(self) -> int:
        return self.config.constraint_length - 1

    def encode(self, bits: np.ndarray) -> np.ndarray:
        """Terminated encoding; output length 2 * (len(bits) + K - 1)."""
        u = np.concatenate([np.asarray(bits, dtype=np.int64), np.zeros(self.tail_length, dtype=np.int64)])
        coded = np.empty(2 * u.size, dtype=np.uint8)
        for j, taps in enumerate(self.taps):
            coded[j::2] = np.convolve(u, taps)[: u.size] % 2
        return coded

    def viterbi_decode(self, coded_bits: np.ndarray) -> np.ndarray:
        """Hard-decision maximum-likelihood decoding of a terminated stream."""
        coded = np.asarray(coded_bits, dtype=np.uint8)
        if coded.size % 2 or coded.size // 2 < self.tail_length:
            raise CodingError(f"malformed coded length {coded.size} for a terminated rate-1/2 stream")
        received = coded.reshape(-1, 2)
        n_steps = received.shape[0]

        metric = np.full(self.n_states, _UNREACHED, dtype=np.int64)
        metric[0] = 0
        decisions = np.empty((n_steps, self.n_states), dtype=np.uint8)
        rows = np.arange(self.n_states)
        for t in range(n_steps):
            branch = (self.branch_outputs != received[t]).sum(axis=-1)
            candidates = metric[self.predecessors] + branch
            choice = np.argmin(candidates, axis=1)
            metric = candidates[rows, choice]
            decisions[t] = choice

        decoded = np.empty(n_steps, dtype=np.uint8)
        state = 0
        for t in range(n_steps - 1, -1, -1):
            decoded[t] = self.input_bit[state]
            state = self.predecessors[state, decisions[t, state]]
        return decoded[: n_steps - self.tail_length]


def _parity(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=np.int64)
    parity = np.zeros_like(values)
    while values.any():
        parity ^= values & 1
        values = values >> 1
    return parity


def encode(bits: np.ndarray, config: CodeConfig = CodeConfig()) -> np.ndarray:
    return ConvolutionalCode(config).encode(bits)


def viterbi_decode(coded_bits: np.ndarray, config: CodeConfig = CodeConfig()) -> np.ndarray:
    return ConvolutionalCode(config).viterbi_decode(coded_bits)


class BitInterleaver:
    """Seeded uniform permutation over a fixed-length coded block."""

    def __init__(self, length: int, seed: int):
        self.length = length
        self.permutation = np.random.default_rng(seed).permutation(length)

    def _check(self, bits: np.ndarray) -> np.ndarray:
        bits = np.asarray(bits)
        if bits.size != self.length:
            raise CodingError(f"interleaver length mismatch: got {bits.size}, expected {self.length}")
        return bits

    def interleave(self, bits: np.ndarray) -> np.ndarray:
        return self._check(bits)[self.permutation]

    def deinterleave(self, bits: np.ndarray) -> np.ndarray:
        bits = self._check(bits)
        out = np.empty_like(bits)
        out[self.permutation] = bits
        return out


def interleave(bits: np.ndarray, seed: int) -> np.ndarray:
    return BitInterleaver(np.size(bits), seed).interleave(bits)


def deinterleave(bits: np.ndarray, seed: int) -> np.ndarray:
    return BitInterleaver(np.size(bits), seed).deinterleave(bits)


def bits_per_symbol(m_order: int) -> int:
    k = int(round(math.log2(m_order))) if m_order > 1 else 0
    if k < 1 or (1 << k) != m_order:
        raise CodingError(f"M={m_order} is not a power of two")
    return k


def map_bits_to_symbols(bits: np.ndarray, n_clusters: int, m_order: int) -> np.ndarray:
    """Consecutive log2(M)-bit groups, MSB first, to an F x L symbol array."""
    k = bits_per_symbol(m_order)
    bits = np.asarray(bits, dtype=np.int64)
    if bits.size % (n_clusters * k):
        raise CodingError(f"{bits.size} bits is not a multiple of the frame capacity {n_clusters * k}")
    weights = 1 << np.arange(k - 1, -1, -1)
    return (bits.reshape(-1, k) @ weights).reshape(-1, n_clusters)


def map_symbols_to_bits(symbols: np.ndarray, n_clusters: int, m_order: int) -> np.ndarray:
    k = bits_per_symbol(m_order)
    symbols = np.asarray(symbols, dtype=np.int64)
    if symbols.size % n_clusters:
        raise CodingError(f"{symbols.size} symbols do not fill frames of {n_clusters} clusters")
    shifts = np.arange(k - 1, -1, -1)
    return ((symbols.reshape(-1, 1) >> shifts) & 1).astype(np.uint8).reshape(-1)


def message_length(frames_per_block: int, n_clusters: int, m_order: int, constraint_length: int = 7) -> int:
    """Info bits per block whose terminated codeword exactly fills the frames."""
    capacity = frames_per_block * n_clusters * bits_per_symbol(m_order)
    if capacity % 2:
        raise CodingError(f"block capacity {capacity} bits cannot hold a rate-1/2 codeword")
    k = capacity // 2 - (constraint_length - 1)
    if k < 1:
        raise CodingError(f"{frames_per_block} frames are too few for a K={constraint_length} code")
    return k
