"""Long Monte-Carlo runs at full scale; run with ``pytest -m slow``."""
from dataclasses import replace

import numpy as np
import pytest

from tdcs.config import SimConfig
from tdcs.harness import run_efficiency_study, run_sidelobe_study

pytestmark = pytest.mark.slow

GRID_0_16 = tuple(float(x) for x in range(17))
# Monte-Carlo jitter allowed between neighbouring required Eb/N0 values.
SLACK_DB = 0.25


def _required(config):
    records = run_efficiency_study(config)
    assert all(r.reached and not r.below_grid for r in records)
    return {r.n_clusters: r.required_ebn0_db_at_target_ber for r in records}


@pytest.fixture(scope="module")
def awgn_base(tmp_path_factory):
    return SimConfig(
        n_bins=256,
        partition_trials=1000,
        ebn0_grid_db=GRID_0_16,
        max_frames=50_000,
        min_bit_errors=200,
        batch_frames=256,
        target_ber=1e-3,
        workers=4,
        name="acceptance",
        output_dir=str(tmp_path_factory.mktemp("acceptance")),
    )


@pytest.fixture(scope="module")
def random_required(awgn_base):
    return _required(replace(awgn_base, scheme="random", clusters=(1, 2, 4, 8)))


def test_sidelobe_study_at_full_trials(tmp_path):
    config = SimConfig(
        n_bins=256, clusters=(1, 2, 4, 8, 16, 32, 64), workers=4, output_dir=str(tmp_path)
    )
    rows = run_sidelobe_study(config, trials=10_000)
    beta_min = np.array([row.beta_min_random for row in rows])
    assert np.all(np.diff(beta_min) >= -1e-12)
    for row in rows[1:]:
        assert row.beta_min_random < row.beta_continuous


def test_two_random_clusters_cost_little(random_required):
    assert random_required[2] - random_required[1] <= 0.5


def test_required_ebn0_grows_with_clusters(random_required):
    values = [random_required[l] for l in (1, 2, 4, 8)]
    assert all(b >= a - SLACK_DB for a, b in zip(values, values[1:]))


def test_continuous_allocation_needs_more_power(awgn_base, random_required):
    continuous = _required(replace(awgn_base, scheme="continuous", clusters=(8,)))
    assert continuous[8] - random_required[8] >= 3.0


def test_coded_multipath_penalty_accelerates(tmp_path):
    config = SimConfig(
        n_bins=256,
        scheme="random",
        clusters=(2, 4, 8),
        channel="multipath",
        coding=True,
        ebn0_grid_db=tuple(float(x) for x in range(0, 31, 2)),
        max_frames=20_000,
        min_bit_errors=200,
        target_ber=1e-3,
        workers=4,
        output_dir=str(tmp_path),
    )
    required = _required(config)
    assert required[8] - required[4] > required[4] - required[2]
