import math
from dataclasses import replace

import pytest

from tdcs.config import REFERENCE_SCENARIO, SimConfig
from tdcs.spectrum import AvailabilityVector, build_availability
from tdcs.waveform import generate_phase_vector


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ("TDCS_SEED", "TDCS_WORKERS", "TDCS_OUTPUT_DIR", "TDCS_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)


@pytest.fixture
def avail_256():
    return build_availability(REFERENCE_SCENARIO, 256)


@pytest.fixture
def full_band_16():
    return AvailabilityVector.from_unoccupied(16, range(16))


@pytest.fixture
def phase_256():
    return generate_phase_vector(seed=1, n_bins=256)


@pytest.fixture
def small_config(tmp_path):
    """N=64 reference scenario (N_C=48) with tiny Monte-Carlo budgets."""
    return SimConfig(
        n_bins=64,
        scheme="continuous",
        clusters=(1, 2, 4),
        partition_trials=20,
        ebn0_grid_db=(math.inf,),
        max_frames=64,
        min_bit_errors=1,
        batch_frames=32,
        name="test",
        output_dir=str(tmp_path),
    )


@pytest.fixture
def noisy_config(small_config):
    return replace(small_config, ebn0_grid_db=(0.0, 4.0, 8.0), max_frames=256, min_bit_errors=100)
