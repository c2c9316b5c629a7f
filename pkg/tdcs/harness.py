"""Sweeps and studies behind the CLI: BER, efficiency, sidelobes, design export."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.special import erfc

from .config import SimConfig, validate
from .errors import SpectrumError
from .graph import build_graph
from .link import LinkSetup, build_link, build_phase, simulate_point
from .records import (
    EFFICIENCY_HEADER,
    SIDELOBE_HEADER,
    BerRecord,
    EfficiencyRecord,
    SidelobeRow,
    write_csv,
)
from .reporting import render
from .spectrum import (
    BandScenario,
    ClusterPartition,
    estimate_beta_min,
    log10_search_space,
    partition_continuous,
    save_partition,
    sidelobe_report,
)
from .waveform import energy_normalization, save_fmw, synthesize_fmw

logger = logging.getLogger(__name__)


def spectrum_efficiency(n_bins: int, m_order: int, n_clusters: int, scenario: BandScenario) -> float:
    """eta = L * delta_f * log2(M) / (gamma * W) in bits/s/Hz; L = 1 is the traditional system."""
    gamma = scenario.unoccupied_ratio
    if gamma <= 0:
        raise SpectrumError("unoccupied ratio is zero")
    delta_f = scenario.bandwidth_hz / n_bins
    return n_clusters * delta_f * math.log2(m_order) / (gamma * scenario.bandwidth_hz)


def union_bound_ser(ebn0_db: float, partition: ClusterPartition, m_order: int, info_bits_per_frame: Optional[float] = None) -> float:
    """Union bound on uncoded CCSK symbol error rate, averaged over clusters.

    Each wrong delay tau contributes Q(sqrt(Es/N0 * (1 - Re R_tau))), with
    Es the per-cluster symbol energy and R_tau its normalized sidelobe.
    """
    if info_bits_per_frame is None:
        info_bits_per_frame = partition.n_clusters * math.log2(m_order)
    es_n0 = 10.0 ** (ebn0_db / 10.0) * info_bits_per_frame / partition.n_clusters
    step = partition.n_bins // m_order
    real = sidelobe_report(partition).per_cluster_normalized_sidelobes.real[:, step - 1::step]
    pairwise = 0.5 * erfc(np.sqrt(es_n0 * np.clip(1.0 - real, 0.0, None) / 2.0))
    return float(np.minimum(pairwise.sum(axis=-1), 1.0).mean())


def union_bound_ber(ebn0_db: float, partition: ClusterPartition, m_order: int) -> float:
    return union_bound_ser(ebn0_db, partition, m_order) * m_order / (2 * (m_order - 1))


def run_ber_sweep(config: SimConfig) -> List[BerRecord]:
    final_state = sweep_state(config)
    return final_state["records"]


def sweep_state(config: SimConfig) -> dict:
    """Run the planner/simulator/reviewer/assembler graph and return its final state."""
    app = build_graph()
    return app.invoke({"sim_config": config, "revision_count": 0, "jobs": [], "results": {}})


def _required_ebn0(
    link: LinkSetup,
    config: SimConfig,
    l_index: int,
    records: List[BerRecord],
) -> Tuple[float, bool, bool]:
    """(required Eb/N0, reached, below_grid); below_grid means the first grid point already met the target."""
    target = config.target_ber
    ordered = sorted(records, key=lambda r: r.ebn0_db)
    crossing = next((i for i, r in enumerate(ordered) if r.bits and r.ber <= target), None)
    if crossing is None:
        return math.nan, False, False
    if crossing == 0:
        return ordered[0].ebn0_db, True, True

    lo, hi = ordered[crossing - 1], ordered[crossing]
    lo_db, lo_ber, hi_db, hi_ber = lo.ebn0_db, lo.ber, hi.ebn0_db, hi.ber
    if not math.isfinite(hi_db):
        return math.nan, False, False
    for step in range(config.bisection_steps):
        mid = 0.5 * (lo_db + hi_db)
        counts = simulate_point(
            link,
            mid,
            seed=config.seed,
            key=(l_index, len(config.ebn0_grid_db) + step),
            max_frames=config.max_frames,
            min_bit_errors=config.min_bit_errors,
            batch_frames=config.batch_frames,
        )
        ber = counts.bit_errors / counts.bits
        if ber <= target:
            hi_db, hi_ber = mid, ber
        else:
            lo_db, lo_ber = mid, ber

    if hi_ber <= 0 or lo_ber <= 0:
        return hi_db, True, False
    # log-linear interpolation inside the final bracket
    frac = (math.log10(lo_ber) - math.log10(target)) / (math.log10(lo_ber) - math.log10(hi_ber))
    return lo_db + frac * (hi_db - lo_db), True, False


def run_efficiency_study(config: SimConfig) -> List[EfficiencyRecord]:
    """Required Eb/N0 at the target BER for each L, paired with its spectrum efficiency."""
    state = sweep_state(config)
    by_cluster: Dict[int, List[BerRecord]] = {}
    for record in state["records"]:
        by_cluster.setdefault(record.n_clusters, []).append(record)

    tasks = [
        (state["links"][n_clusters], config, l_index, by_cluster.get(n_clusters, []))
        for l_index, n_clusters in enumerate(config.clusters)
    ]
    if config.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            required = list(pool.map(_required_ebn0, *zip(*tasks)))
    else:
        required = [_required_ebn0(*task) for task in tasks]

    records = []
    for n_clusters, (ebn0_db, reached, below_grid) in zip(config.clusters, required):
        eta = spectrum_efficiency(config.n_bins, config.modulation_order, n_clusters, config.scenario)
        if not reached:
            logger.warning("L=%d: target BER %.0e not reached on the grid", n_clusters, config.target_ber)
        elif below_grid:
            logger.warning("L=%d: target BER already met at %g dB, the lowest grid point", n_clusters, ebn0_db)
        records.append(EfficiencyRecord(
            scheme=config.scheme,
            n_bins=config.n_bins,
            n_clusters=n_clusters,
            eta_bits_per_s_per_hz=eta,
            required_ebn0_db_at_target_ber=ebn0_db,
            target_ber=config.target_ber,
            reached=reached,
            below_grid=below_grid,
        ))
    return records


def run_sidelobe_study(config: SimConfig, trials: Optional[int] = None) -> List[SidelobeRow]:
    avail = validate(config)
    trials = trials or config.partition_trials
    rows = []
    for n_clusters in config.clusters:
        continuous = sidelobe_report(partition_continuous(avail, n_clusters))
        _, best = estimate_beta_min(
            avail, n_clusters, trials=trials, seed=config.seed, workers=config.workers, m_order=config.modulation_order
        )
        random_report = sidelobe_report(best)
        rows.append(SidelobeRow(
            n_bins=config.n_bins,
            n_clusters=n_clusters,
            trials=trials,
            beta_continuous=continuous.beta,
            beta_continuous_magnitude=continuous.beta_magnitude,
            beta_min_random=random_report.beta,
            beta_min_random_magnitude=random_report.beta_magnitude,
        ))
        logger.info(
            "L=%d: beta continuous %.4f, beta_min random %.4f", n_clusters, continuous.beta, random_report.beta
        )
    return rows


def export_design(config: SimConfig, n_clusters: int, out_dir: Path) -> List[Path]:
    """Write the partition for L clusters plus one FMW dump per cluster."""
    avail = validate(config)
    link = build_link(config, avail, n_clusters, build_phase(config))
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = f"{config.name}_N{config.n_bins}_L{n_clusters}_{config.scheme}"
    paths = [save_partition(link.partition, out_dir / f"{stem}_partition.txt")]
    lam = energy_normalization(config.n_bins, link.partition.n_unoccupied)
    for l, cluster in enumerate(link.partition.clusters):
        fmw = synthesize_fmw(cluster, link.phase, config.n_bins, lam)
        paths.append(save_fmw(fmw, out_dir / f"{stem}_fmw{l}.txt"))
    return paths


def render_info(config: SimConfig) -> str:
    avail = validate(config)
    rows = [
        {
            "n_clusters": l,
            "eta": spectrum_efficiency(config.n_bins, config.modulation_order, l, config.scenario),
            "cluster_size": avail.n_unoccupied // l,
            "log10_space": log10_search_space(avail.n_unoccupied, l),
        }
        for l in config.clusters
    ]
    return render(
        "info.txt.j2",
        scenario=config.scenario,
        n_bins=config.n_bins,
        m_order=config.modulation_order,
        delta_f=config.bandwidth_hz / config.n_bins,
        n_unoccupied=avail.n_unoccupied,
        rows=rows,
    )


def write_sweep_outputs(config: SimConfig, state: dict) -> List[Path]:
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = [out_dir / f"{config.name}_ber.csv"]
    paths[0].write_text(state["csv_text"])
    if config.manifest:
        manifest = out_dir / f"{config.name}_manifest.txt"
        manifest.write_text(state["manifest_text"])
        paths.append(manifest)
        for n_clusters, link in sorted(state["links"].items()):
            paths.append(save_partition(link.partition, out_dir / f"{config.name}_L{n_clusters}_partition.txt"))
    return paths


def write_efficiency_outputs(config: SimConfig, records: List[EfficiencyRecord]) -> Path:
    return write_csv(Path(config.output_dir) / f"{config.name}_efficiency.csv", EFFICIENCY_HEADER, records)


def write_sidelobe_outputs(config: SimConfig, rows: List[SidelobeRow]) -> Path:
    return write_csv(Path(config.output_dir) / f"{config.name}_sidelobes.csv", SIDELOBE_HEADER, rows)

