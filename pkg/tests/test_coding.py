import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tdcs.coding import (
    BitInterleaver,
    CodeConfig,
    ConvolutionalCode,
    deinterleave,
    encode,
    interleave,
    map_bits_to_symbols,
    map_symbols_to_bits,
    message_length,
    viterbi_decode,
)
from tdcs.errors import CodingError

CODE = ConvolutionalCode()
bit_lists = st.lists(st.integers(0, 1), min_size=1, max_size=60)


def test_impulse_response_of_171_133():
    coded = encode(np.array([1]))
    assert coded.size == 14
    pairs = coded.reshape(-1, 2).tolist()
    assert pairs == [[1, 1], [1, 0], [1, 1], [1, 1], [0, 0], [0, 1], [1, 1]]


@settings(max_examples=50, deadline=None)
@given(a=bit_lists, data=st.data())
def test_encoder_is_linear(a, data):
    b = data.draw(st.lists(st.integers(0, 1), min_size=len(a), max_size=len(a)))
    a, b = np.array(a), np.array(b)
    assert np.array_equal(CODE.encode(a ^ b), CODE.encode(a) ^ CODE.encode(b))


@settings(max_examples=50, deadline=None)
@given(message=bit_lists)
def test_noiseless_decoding(message):
    message = np.array(message)
    assert np.array_equal(CODE.viterbi_decode(CODE.encode(message)), message)


def test_every_single_error_is_corrected():
    message = np.random.default_rng(0).integers(0, 2, 64)
    coded = CODE.encode(message)
    for position in range(coded.size):
        corrupted = coded.copy()
        corrupted[position] ^= 1
        assert np.array_equal(CODE.viterbi_decode(corrupted), message), position


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_four_errors_are_corrected(seed):
    rng = np.random.default_rng(seed)
    message = rng.integers(0, 2, 40)
    coded = CODE.encode(message)
    coded[rng.choice(coded.size, 4, replace=False)] ^= 1
    assert np.array_equal(viterbi_decode(coded), message)


def test_malformed_streams_are_rejected():
    with pytest.raises(CodingError):
        CODE.viterbi_decode(np.zeros(13, dtype=np.uint8))
    with pytest.raises(CodingError):
        CODE.viterbi_decode(np.zeros(4, dtype=np.uint8))
    with pytest.raises(CodingError):
        CodeConfig(generator_polynomials=(0o171,))
    with pytest.raises(CodingError):
        CodeConfig(constraint_length=3, generator_polynomials=(0o171, 0o133))


def test_interleaver_is_a_seeded_permutation():
    bits = np.arange(100)
    shuffled = interleave(bits, seed=7)
    assert not np.array_equal(shuffled, bits)
    assert np.array_equal(np.sort(shuffled), bits)
    assert np.array_equal(shuffled, BitInterleaver(100, 7).interleave(bits))
    assert np.array_equal(deinterleave(shuffled, seed=7), bits)
    with pytest.raises(CodingError, match="length mismatch"):
        BitInterleaver(100, 7).interleave(np.arange(99))


def test_bit_mapping_is_msb_first():
    bits = np.array([1, 0, 0, 1, 1, 1, 0, 0])
    symbols = map_bits_to_symbols(bits, n_clusters=2, m_order=4)
    assert symbols.tolist() == [[2, 1], [3, 0]]
    assert map_symbols_to_bits(symbols, 2, 4).tolist() == bits.tolist()
    with pytest.raises(CodingError, match="power of two"):
        map_bits_to_symbols(bits, 2, 6)
    with pytest.raises(CodingError, match="frame capacity"):
        map_bits_to_symbols(bits[:6], 2, 4)


def test_message_fills_the_block():
    k = message_length(32, 1, 256)
    assert k == 122
    assert CODE.encode(np.zeros(k)).size == 32 * 1 * 8
    with pytest.raises(CodingError):
        message_length(1, 1, 4)
