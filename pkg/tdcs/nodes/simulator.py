import logging
from concurrent.futures import ProcessPoolExecutor, as_completed

from ..link import LinkSetup, simulate_point
from ..records import BerRecord
from .state import SweepJob, SweepState

logger = logging.getLogger(__name__)


def run_job(link: LinkSetup, job: SweepJob, scheme: str, seed: int, batch_frames: int) -> BerRecord:
    counts = simulate_point(
        link,
        job["ebn0_db"],
        seed=seed,
        key=(job["l_index"], job["grid_index"]),
        max_frames=job["max_frames"],
        min_bit_errors=job["min_bit_errors"],
        batch_frames=batch_frames,
    )
    return BerRecord(
        scheme=scheme,
        n_bins=link.n_bins,
        n_clusters=job["n_clusters"],
        ebn0_db=job["ebn0_db"],
        frames=counts.frames,
        bits=counts.bits,
        bit_errors=counts.bit_errors,
        symbol_errors=counts.symbol_errors,
    )


def _log_record(record: BerRecord):
    logger.info(
        "L=%d Eb/N0=%g dB: BER=%.3e (%d errors / %d bits, %d frames)",
        record.n_clusters, record.ebn0_db, record.ber, record.bit_errors, record.bits, record.frames,
    )


def simulator_node(state: SweepState):
    logger.info("--- SIMULATOR NODE ---")
    config = state["sim_config"]
    links = state["links"]
    jobs = [state["jobs"][i] for i in state.get("pending", [])]
    results = dict(state.get("results", {}))

    def args(job):
        return links[job["n_clusters"]], job, config.scheme, config.seed, config.batch_frames

    if config.workers <= 1 or len(jobs) <= 1:
        for job in jobs:
            results[job["index"]] = run_job(*args(job))
            _log_record(results[job["index"]])
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            futures = {pool.submit(run_job, *args(job)): job["index"] for job in jobs}
            for future in as_completed(futures):
                results[futures[future]] = future.result()
                _log_record(results[futures[future]])

    return {"results": results, "pending": []}
