"""Spectrum availability, cluster partitions and autocorrelation sidelobes.

Bins are centred at (k + 0.5) * W / N. A partition splits the unoccupied set
into L equal, disjoint clusters; the allocation schemes differ only in how the
unoccupied bins are ordered before the split.
"""

from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import SpectrumError

logger = logging.getLogger(__name__)

SeedLike = Union[int, np.random.SeedSequence]


@dataclass(frozen=True)
class BandScenario:
    bandwidth_hz: float
    occupied_ranges_hz: Tuple[Tuple[float, float], ...] = ()

    def __post_init__(self):
        if self.bandwidth_hz <= 0:
            raise SpectrumError(f"bandwidth must be positive, got {self.bandwidth_hz}")
        ranges = tuple((float(lo), float(hi)) for lo, hi in self.occupied_ranges_hz)
        for lo, hi in ranges:
            if not 0 <= lo < hi <= self.bandwidth_hz:
                raise SpectrumError(f"occupied range [{lo}, {hi}) outside [0, {self.bandwidth_hz})")
        object.__setattr__(self, "occupied_ranges_hz", ranges)

    def merged_ranges(self) -> list:
        """Occupied ranges normalized by union, sorted by start."""
        merged = []
        for lo, hi in sorted(self.occupied_ranges_hz):
            if merged and lo <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        return [tuple(r) for r in merged]

    @property
    def unoccupied_ratio(self) -> float:
        occupied = sum(hi - lo for lo, hi in self.merged_ranges())
        return (self.bandwidth_hz - occupied) / self.bandwidth_hz


@dataclass(frozen=True, eq=False)
class AvailabilityVector:
    n_bins: int
    mask: np.ndarray

    @property
    def unoccupied(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    @property
    def n_unoccupied(self) -> int:
        return int(np.count_nonzero(self.mask))

    @classmethod
    def from_unoccupied(cls, n_bins: int, unoccupied: Sequence[int]) -> "AvailabilityVector":
        mask = np.zeros(n_bins, dtype=np.int8)
        idx = np.asarray(unoccupied, dtype=int)
        if idx.size and (idx.min() < 0 or idx.max() >= n_bins):
            raise SpectrumError(f"unoccupied indices must lie in [0, {n_bins})")
        mask[idx] = 1
        if not mask.any():
            raise SpectrumError("no spectrum holes")
        return cls(n_bins=n_bins, mask=mask)


@dataclass(frozen=True, eq=False)
class ClusterPartition:
    clusters: Tuple[np.ndarray, ...]
    n_bins: int

    def __post_init__(self):
        clusters = tuple(np.sort(np.asarray(c, dtype=int)) for c in self.clusters)
        if not clusters:
            raise SpectrumError("partition needs at least one cluster")
        sizes = {c.size for c in clusters}
        if len(sizes) != 1 or 0 in sizes:
            raise SpectrumError(f"cluster size mismatch: sizes {sorted(c.size for c in clusters)}")
        flat = np.concatenate(clusters)
        if flat.min() < 0 or flat.max() >= self.n_bins:
            raise SpectrumError(f"cluster bins must lie in [0, {self.n_bins})")
        if np.unique(flat).size != flat.size:
            raise SpectrumError("clusters are not pairwise disjoint")
        object.__setattr__(self, "clusters", clusters)

    @property
    def n_clusters(self) -> int:
        return len(self.clusters)

    @property
    def cluster_size(self) -> int:
        return self.clusters[0].size

    @property
    def n_unoccupied(self) -> int:
        return self.n_clusters * self.cluster_size

    def masks(self) -> np.ndarray:
        """L x N matrix of per-cluster availability vectors A^l."""
        masks = np.zeros((self.n_clusters, self.n_bins))
        for l, cluster in enumerate(self.clusters):
            masks[l, cluster] = 1.0
        return masks

    def covers(self, avail: AvailabilityVector) -> bool:
        return self.n_bins == avail.n_bins and np.array_equal(
            np.sort(np.concatenate(self.clusters)), avail.unoccupied
        )

    def __eq__(self, other):
        if not isinstance(other, ClusterPartition):
            return NotImplemented
        return self.n_bins == other.n_bins and len(self.clusters) == len(other.clusters) and all(
            np.array_equal(a, b) for a, b in zip(self.clusters, other.clusters)
        )


@dataclass(frozen=True, eq=False)
class SidelobeReport:
    per_cluster_normalized_sidelobes: np.ndarray  # L x (N - 1), tau = 1..N-1
    beta: float
    beta_magnitude: float
    worst_cluster: int = field(default=0)
    worst_delay: int = field(default=1)


def build_availability(scenario: BandScenario, n_bins: int) -> AvailabilityVector:
    if n_bins < 2:
        raise SpectrumError(f"n_bins must be at least 2, got {n_bins}")
    centers = (np.arange(n_bins) + 0.5) * scenario.bandwidth_hz / n_bins
    occupied = np.zeros(n_bins, dtype=bool)
    for lo, hi in scenario.merged_ranges():
        occupied |= (centers >= lo) & (centers < hi)
    if occupied.all():
        raise SpectrumError("no spectrum holes")
    mask = (~occupied).astype(np.int8)
    logger.debug("availability: N=%d N_C=%d", n_bins, int(mask.sum()))
    return AvailabilityVector(n_bins=n_bins, mask=mask)


def _check_divisible(n_unoccupied: int, n_clusters: int):
    if n_clusters < 1 or n_unoccupied % n_clusters:
        raise SpectrumError(f"cluster size mismatch: L={n_clusters} does not divide N_C={n_unoccupied}")


def _split(ordered: np.ndarray, n_clusters: int, n_bins: int) -> ClusterPartition:
    return ClusterPartition(clusters=tuple(np.split(ordered, n_clusters)), n_bins=n_bins)


def partition_continuous(avail: AvailabilityVector, n_clusters: int) -> ClusterPartition:
    _check_divisible(avail.n_unoccupied, n_clusters)
    return _split(avail.unoccupied, n_clusters, avail.n_bins)


def partition_random(avail: AvailabilityVector, n_clusters: int, seed: SeedLike) -> ClusterPartition:
    _check_divisible(avail.n_unoccupied, n_clusters)
    rng = np.random.default_rng(seed)
    return _split(rng.permutation(avail.unoccupied), n_clusters, avail.n_bins)


def enumerate_partitions(avail: AvailabilityVector, n_clusters: int) -> Iterator[ClusterPartition]:
    """Every ordered equal-size partition of the unoccupied set; exponential, tiny inputs only."""
    _check_divisible(avail.n_unoccupied, n_clusters)
    size = avail.n_unoccupied // n_clusters

    def assign(remaining: Tuple[int, ...]):
        if not remaining:
            yield ()
            return
        for chosen in itertools.combinations(remaining, size):
            rest = tuple(i for i in remaining if i not in chosen)
            for tail in assign(rest):
                yield (chosen,) + tail

    for clusters in assign(tuple(int(i) for i in avail.unoccupied)):
        yield ClusterPartition(clusters=tuple(np.array(c) for c in clusters), n_bins=avail.n_bins)


def _sidelobe_matrix(masks: np.ndarray) -> np.ndarray:
    # sum_p A_p e^{j2 pi p tau / N} = N * IDFT{A}_tau
    n_bins = masks.shape[-1]
    sizes = masks.sum(axis=-1, keepdims=True)
    return (np.fft.ifft(masks, axis=-1) * n_bins / sizes)[..., 1:]


def normalized_sidelobes(cluster: Sequence[int], n_bins: int) -> np.ndarray:
    cluster = np.asarray(cluster, dtype=int)
    if cluster.size == 0:
        raise SpectrumError("cluster is empty")
    mask = np.zeros(n_bins)
    mask[cluster] = 1.0
    return _sidelobe_matrix(mask)


def sidelobe_report(partition: ClusterPartition) -> SidelobeReport:
    lobes = _sidelobe_matrix(partition.masks())
    real = lobes.real
    worst = np.unravel_index(np.argmax(real), real.shape)
    return SidelobeReport(
        per_cluster_normalized_sidelobes=lobes,
        beta=float(real[worst]),
        beta_magnitude=float(np.abs(lobes).max()),
        worst_cluster=int(worst[0]),
        worst_delay=int(worst[1]) + 1,
    )


def largest_sidelobe(partition: ClusterPartition) -> float:
    return sidelobe_report(partition).beta


def _candidate_delays(n_bins: int, m_order: Optional[int]) -> np.ndarray:
    step = n_bins // (m_order or n_bins)
    return np.arange(step, n_bins, step)


def _cluster_ambiguous(cluster: np.ndarray, n_bins: int, delays: np.ndarray) -> bool:
    # Re{R_tau} = 1 exactly when every bin k has k * tau = 0 (mod N)
    return bool(((np.outer(delays, cluster) % n_bins) == 0).all(axis=1).any())


def is_ambiguous(partition: ClusterPartition, m_order: Optional[int] = None) -> bool:
    """True when a candidate CCSK delay has a real sidelobe equal to the mainlobe."""
    delays = _candidate_delays(partition.n_bins, m_order)
    return any(_cluster_ambiguous(c, partition.n_bins, delays) for c in partition.clusters)


def repair_ambiguity(
    partition: ClusterPartition,
    m_order: Optional[int] = None,
    seed: SeedLike = 0,
    max_swaps: int = 10_000,
) -> ClusterPartition:
    """Swap bins between clusters until no cluster is shift-ambiguous.

    Each swap trades one bin of an ambiguous cluster for one bin of another
    cluster and is kept only if neither cluster is ambiguous afterwards.
    A single cluster has nothing to swap with and is returned unchanged.
    """
    n_bins = partition.n_bins
    delays = _candidate_delays(n_bins, m_order)
    clusters = [c.copy() for c in partition.clusters]
    bad = [l for l, c in enumerate(clusters) if _cluster_ambiguous(c, n_bins, delays)]
    if not bad or len(clusters) == 1:
        return partition

    rng = np.random.default_rng(seed)
    size = partition.cluster_size
    for _ in range(max_swaps):
        a = bad[0]
        b = (a + 1 + int(rng.integers(len(clusters) - 1))) % len(clusters)
        i, j = rng.integers(size, size=2)
        new_a, new_b = clusters[a].copy(), clusters[b].copy()
        new_a[i], new_b[j] = clusters[b][j], clusters[a][i]
        if _cluster_ambiguous(new_a, n_bins, delays) or _cluster_ambiguous(new_b, n_bins, delays):
            continue
        clusters[a], clusters[b] = new_a, new_b
        bad = [l for l in bad if l not in (a, b)]
        if not bad:
            return ClusterPartition(clusters=tuple(clusters), n_bins=n_bins)
    raise SpectrumError(f"cannot remove shift ambiguity from L={partition.n_clusters} clusters in {max_swaps} swaps")


def trial_seed(seed: int, index: int) -> np.random.SeedSequence:
    """Sub-seed of Monte-Carlo trial `index`; independent of how many trials run."""
    return np.random.SeedSequence(seed, spawn_key=(index,))


def trial_partition(
    avail: AvailabilityVector,
    n_clusters: int,
    seed: int,
    index: int,
    m_order: Optional[int] = None,
    repair: bool = True,
) -> ClusterPartition:
    """Random partition of trial `index`, made unambiguous when `repair` is set."""
    partition = partition_random(avail, n_clusters, trial_seed(seed, index))
    if not repair:
        return partition
    return repair_ambiguity(partition, m_order, np.random.SeedSequence(seed, spawn_key=(index, 1)))


def _search_chunk(avail, n_clusters, seed, start, stop, m_order, repair):
    best_beta, best_index = math.inf, -1
    for i in range(start, stop):
        beta = largest_sidelobe(trial_partition(avail, n_clusters, seed, i, m_order, repair))
        if beta < best_beta:
            best_beta, best_index = beta, i
    return best_beta, best_index


def estimate_beta_min(
    avail: AvailabilityVector,
    n_clusters: int,
    trials: int = 10_000,
    seed: int = 0,
    workers: int = 1,
    m_order: Optional[int] = None,
    repair: bool = True,
) -> Tuple[float, ClusterPartition]:
    """Best largest-sidelobe over `trials` seeded random partitions.

    Trial i always draws from trial_seed(seed, i), so the result does not
    depend on `workers` and only improves as `trials` grows. Among equal
    betas the lowest trial index wins. With `repair`, every draw first goes
    through repair_ambiguity for CCSK order `m_order` (default N).
    """
    if trials < 1:
        raise SpectrumError(f"trials must be at least 1, got {trials}")
    _check_divisible(avail.n_unoccupied, n_clusters)

    if workers <= 1 or trials < 2 * workers:
        results = [_search_chunk(avail, n_clusters, seed, 0, trials, m_order, repair)]
    else:
        bounds = np.linspace(0, trials, workers + 1).astype(int)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_search_chunk, avail, n_clusters, seed, int(lo), int(hi), m_order, repair)
                for lo, hi in zip(bounds[:-1], bounds[1:])
                if hi > lo
            ]
            results = [f.result() for f in futures]

    beta_min, best_index = min(results, key=lambda r: (r[0], r[1]))
    logger.info("beta_min L=%d over %d trials: %.4f (trial %d)", n_clusters, trials, beta_min, best_index)
    return beta_min, trial_partition(avail, n_clusters, seed, best_index, m_order, repair)


def search_space_size(n_unoccupied: int, n_clusters: int) -> Tuple[int, float]:
    """Exact multinomial count N_C!/((N_C/L)!)^L and its Stirling estimate."""
    _check_divisible(n_unoccupied, n_clusters)
    size = n_unoccupied // n_clusters
    exact = math.factorial(n_unoccupied) // math.factorial(size) ** n_clusters
    log_stirling = (1 - n_clusters) / 2 * math.log(2 * math.pi * n_unoccupied) + (
        n_unoccupied + n_clusters / 2
    ) * math.log(n_clusters)
    try:
        stirling = math.exp(log_stirling)
    except OverflowError:
        stirling = math.inf
    return exact, stirling


def log10_search_space(n_unoccupied: int, n_clusters: int) -> float:
    _check_divisible(n_unoccupied, n_clusters)
    size = n_unoccupied // n_clusters
    return (math.lgamma(n_unoccupied + 1) - n_clusters * math.lgamma(size + 1)) / math.log(10)


def format_partition(partition: ClusterPartition) -> str:
    return "".join(" ".join(str(int(k)) for k in cluster) + "\n" for cluster in partition.clusters)


def parse_partition(text: str, n_bins: int) -> ClusterPartition:
    rows = [line.split() for line in text.splitlines() if line.strip()]
    if not rows:
        raise SpectrumError("partition text holds no clusters")
    try:
        clusters = tuple(np.array([int(tok) for tok in row]) for row in rows)
    except ValueError as exc:
        raise SpectrumError(f"malformed partition text: {exc}") from exc
    return ClusterPartition(clusters=clusters, n_bins=n_bins)


def save_partition(partition: ClusterPartition, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(format_partition(partition))
    return path


def load_partition(path: Union[str, Path], n_bins: int) -> ClusterPartition:
    return parse_partition(Path(path).read_text(), n_bins)
