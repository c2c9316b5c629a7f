import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tdcs.config import REFERENCE_SCENARIO
from tdcs.errors import SpectrumError
from tdcs.spectrum import (
    AvailabilityVector,
    BandScenario,
    ClusterPartition,
    build_availability,
    enumerate_partitions,
    estimate_beta_min,
    format_partition,
    is_ambiguous,
    largest_sidelobe,
    log10_search_space,
    normalized_sidelobes,
    parse_partition,
    partition_continuous,
    partition_random,
    repair_ambiguity,
    search_space_size,
    sidelobe_report,
    trial_partition,
)


def test_reference_band_availability(avail_256):
    occupied = np.flatnonzero(avail_256.mask == 0)
    assert avail_256.n_unoccupied == 192
    assert occupied.tolist() == list(range(64, 96)) + list(range(160, 192))
    assert build_availability(REFERENCE_SCENARIO, 1024).n_unoccupied == 768
    assert REFERENCE_SCENARIO.unoccupied_ratio == pytest.approx(0.75)


def test_overlapping_ranges_are_merged():
    scenario = BandScenario(bandwidth_hz=1.0, occupied_ranges_hz=((0.1, 0.3), (0.2, 0.4)))
    assert scenario.merged_ranges() == [(0.1, 0.4)]
    assert scenario.unoccupied_ratio == pytest.approx(0.7)


def test_fully_occupied_band_is_rejected():
    with pytest.raises(SpectrumError, match="no spectrum holes"):
        build_availability(BandScenario(bandwidth_hz=1.0, occupied_ranges_hz=((0.0, 1.0),)), 16)


def test_continuous_partition_splits_in_order(avail_256):
    partition = partition_continuous(avail_256, 8)
    assert partition.n_clusters == 8 and partition.cluster_size == 24
    assert np.array_equal(np.concatenate(partition.clusters), avail_256.unoccupied)
    assert np.array_equal(partition_continuous(avail_256, 1).clusters[0], avail_256.unoccupied)


def test_cluster_count_must_divide(avail_256):
    with pytest.raises(SpectrumError, match="cluster size mismatch"):
        partition_continuous(avail_256, 5)
    with pytest.raises(SpectrumError, match="cluster size mismatch"):
        partition_random(avail_256, 7, seed=0)


def test_partition_rejects_overlap_and_unequal_sizes():
    with pytest.raises(SpectrumError, match="disjoint"):
        ClusterPartition(clusters=(np.array([0, 1]), np.array([1, 2])), n_bins=4)
    with pytest.raises(SpectrumError, match="cluster size mismatch"):
        ClusterPartition(clusters=(np.array([0, 1]), np.array([2])), n_bins=4)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n_clusters=st.sampled_from([1, 2, 4, 8, 16]))
def test_random_partition_properties(seed, n_clusters):
    avail = build_availability(REFERENCE_SCENARIO, 256)
    partition = partition_random(avail, n_clusters, seed)
    assert partition.covers(avail)
    assert partition == partition_random(avail, n_clusters, seed)

    report = sidelobe_report(partition)
    assert report.per_cluster_normalized_sidelobes.shape == (n_clusters, 255)
    assert np.abs(report.per_cluster_normalized_sidelobes).max() <= 1 + 1e-12
    assert report.beta <= report.beta_magnitude + 1e-12
    # the whole-set sidelobe is the mean of the cluster sidelobes
    assert report.beta >= largest_sidelobe(partition_continuous(avail, 1)) - 1e-12


def test_full_band_has_no_sidelobes(full_band_16):
    report = sidelobe_report(partition_continuous(full_band_16, 1))
    assert report.beta == pytest.approx(0.0, abs=1e-12)
    assert report.beta_magnitude == pytest.approx(0.0, abs=1e-12)


def test_single_bin_sidelobes_have_unit_magnitude():
    lobes = normalized_sidelobes([3], 16)
    assert np.allclose(np.abs(lobes), 1.0)


def test_even_bin_cluster_is_ambiguous(full_band_16):
    evens = ClusterPartition(clusters=(np.arange(0, 16, 2), np.arange(1, 16, 2)), n_bins=16)
    report = sidelobe_report(evens)
    assert report.beta == pytest.approx(1.0)
    assert report.worst_delay == 8
    assert is_ambiguous(evens)
    assert is_ambiguous(evens, m_order=2)
    assert not is_ambiguous(partition_continuous(full_band_16, 2))


def test_search_space_counts():
    assert search_space_size(4, 2)[0] == 6
    assert search_space_size(192, 1)[0] == 1
    exact, stirling = search_space_size(8, 2)
    assert exact == 70
    exact, stirling = search_space_size(64, 2)
    assert exact == math.comb(64, 32)
    assert exact / stirling == pytest.approx(1.0, rel=0.01)
    exact, stirling = search_space_size(768, 8)
    assert stirling == math.inf
    assert log10_search_space(768, 8) == pytest.approx(math.log10(exact), rel=1e-9)


def test_brute_force_matches_random_search():
    avail = AvailabilityVector.from_unoccupied(16, [1, 2, 3, 5, 8, 11, 12, 14])
    partitions = list(enumerate_partitions(avail, 2))
    assert len(partitions) == 70
    exhaustive = min(largest_sidelobe(p) for p in partitions)

    beta_min, best = estimate_beta_min(avail, 2, trials=3000, seed=11)
    assert beta_min == pytest.approx(exhaustive, abs=1e-12)
    assert largest_sidelobe(best) == pytest.approx(beta_min, abs=1e-12)
    assert best.covers(avail)


def test_beta_min_is_deterministic_and_monotone_in_trials(avail_256):
    beta_a, part_a = estimate_beta_min(avail_256, 8, trials=50, seed=3)
    beta_b, part_b = estimate_beta_min(avail_256, 8, trials=50, seed=3)
    assert beta_a == beta_b and part_a == part_b
    beta_more, _ = estimate_beta_min(avail_256, 8, trials=200, seed=3)
    assert beta_more <= beta_a


def test_parallel_search_matches_serial(avail_256):
    serial = estimate_beta_min(avail_256, 4, trials=40, seed=5, workers=1)
    parallel = estimate_beta_min(avail_256, 4, trials=40, seed=5, workers=2)
    assert serial[0] == parallel[0]
    assert serial[1] == parallel[1]


def test_random_allocation_beats_continuous(avail_256):
    continuous = largest_sidelobe(partition_continuous(avail_256, 8))
    beta_min, _ = estimate_beta_min(avail_256, 8, trials=200, seed=0)
    assert continuous > 0.9
    assert beta_min < continuous


def test_partition_text_format(avail_256):
    partition = partition_continuous(avail_256, 4)
    text = format_partition(partition)
    assert len(text.splitlines()) == 4
    assert text.splitlines()[0].split()[:3] == ["0", "1", "2"]
    assert parse_partition(text, 256) == partition
    with pytest.raises(SpectrumError, match="malformed"):
        parse_partition("1 2 x\n", 256)


def test_four_bin_sidelobe_examples():
    assert np.allclose(normalized_sidelobes([0, 2], 4), [0.0, 1.0, 0.0])
    interleaved = ClusterPartition(clusters=(np.array([0, 2]), np.array([1, 3])), n_bins=4)
    assert sidelobe_report(interleaved).beta == pytest.approx(1.0)
    assert is_ambiguous(interleaved)


def test_repair_removes_even_bin_ambiguity():
    evens = ClusterPartition(clusters=(np.arange(0, 16, 2), np.arange(1, 16, 2)), n_bins=16)
    repaired = repair_ambiguity(evens, seed=1)
    assert not is_ambiguous(repaired)
    assert np.array_equal(np.sort(np.concatenate(repaired.clusters)), np.arange(16))
    assert repaired == repair_ambiguity(evens, seed=1)
    assert largest_sidelobe(repaired) < 1.0


def test_repair_leaves_clean_and_single_cluster_partitions_alone(full_band_16):
    continuous = partition_continuous(full_band_16, 2)
    assert repair_ambiguity(continuous, seed=0) is continuous
    whole = ClusterPartition(clusters=(np.arange(0, 16, 2),), n_bins=16)
    assert repair_ambiguity(whole, seed=0) is whole


def test_repair_gives_up_when_every_cluster_is_ambiguous():
    avail = AvailabilityVector.from_unoccupied(16, range(0, 16, 2))
    with pytest.raises(SpectrumError, match="cannot remove shift ambiguity"):
        repair_ambiguity(partition_continuous(avail, 2), seed=0, max_swaps=50)


def test_three_bin_clusters_need_repair(avail_256):
    raw = trial_partition(avail_256, 64, seed=0, index=0, repair=False)
    assert is_ambiguous(raw)
    assert largest_sidelobe(raw) == pytest.approx(1.0)

    beta_min, design = estimate_beta_min(avail_256, 64, trials=20, seed=0, m_order=256)
    assert not is_ambiguous(design)
    assert design.covers(avail_256)
    assert beta_min < largest_sidelobe(partition_continuous(avail_256, 64))


def test_repair_respects_the_ccsk_order(avail_256):
    # with M = 2 only the half-frame shift is a candidate
    design = trial_partition(avail_256, 64, seed=4, index=0, m_order=2)
    assert not is_ambiguous(design, m_order=2)
