"""Cluster-based transform domain communication system (TDCS) simulation."""

from .channel import (
    COST207_RAX6,
    ChannelProfile,
    ChannelRealization,
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
    CodeConfig,
    ConvolutionalCode,
    deinterleave,
    encode,
    interleave,
    map_bits_to_symbols,
    map_symbols_to_bits,
    viterbi_decode,
)
from .config import SimConfig, load_config
from .errors import ChannelError, CodingError, ConfigError, SpectrumError, TdcsError, WaveformError
from .receiver import CorrelationOutput, correlate, demodulate_frame, detect
from .spectrum import (
    AvailabilityVector,
    BandScenario,
    ClusterPartition,
    SidelobeReport,
    build_availability,
    estimate_beta_min,
    largest_sidelobe,
    normalized_sidelobes,
    partition_continuous,
    partition_random,
    search_space_size,
)
from .waveform import Fmw, PhaseVector, SymbolVector, generate_phase_vector, modulate, synthesize_fmw
