import logging

from ..config import validate
from ..link import build_link, build_phase
from ..spectrum import is_ambiguous, largest_sidelobe
from .state import SweepJob, SweepState

logger = logging.getLogger(__name__)


def _plan_jobs(config) -> list:
    jobs = []
    for l_index, n_clusters in enumerate(config.clusters):
        for grid_index, ebn0_db in enumerate(config.ebn0_grid_db):
            jobs.append(SweepJob(
                index=len(jobs),
                l_index=l_index,
                n_clusters=n_clusters,
                grid_index=grid_index,
                ebn0_db=ebn0_db,
                max_frames=config.max_frames,
                min_bit_errors=config.min_bit_errors,
            ))
    return jobs


def planner_node(state: SweepState):
    logger.info("--- PLANNER NODE ---")
    config = state["sim_config"]
    revision_count = state.get("revision_count", 0)

    if not state.get("jobs"):
        # First pass: validate before anything runs, then design one link per L.
        avail = validate(config)
        phase = build_phase(config)
        links, betas, ambiguous = {}, {}, []
        for n_clusters in config.clusters:
            link = build_link(config, avail, n_clusters, phase)
            links[n_clusters] = link
            betas[n_clusters] = largest_sidelobe(link.partition)
            if is_ambiguous(link.partition, config.modulation_order):
                ambiguous.append(n_clusters)
                logger.warning("L=%d partition has a full-height sidelobe; symbol decisions are ambiguous", n_clusters)
            logger.info("L=%d %s partition, beta=%.4f", n_clusters, config.scheme, betas[n_clusters])

        jobs = _plan_jobs(config)
        logger.info("planned %d sweep points", len(jobs))
        return {
            "links": links,
            "partition_betas": betas,
            "ambiguous_clusters": ambiguous,
            "jobs": jobs,
            "pending": [job["index"] for job in jobs],
            "results": {},
            "flagged": [],
            "revision_count": revision_count + 1,
        }

    # Revision pass: give the flagged points twice the budget.
    flagged = state.get("flagged", [])
    jobs = list(state["jobs"])
    results = dict(state.get("results", {}))
    for index in flagged:
        job = dict(jobs[index])
        job["max_frames"] *= 2
        job["min_bit_errors"] *= 2
        jobs[index] = SweepJob(**job)
        results.pop(index, None)
    logger.info("re-planning %d points with doubled budgets", len(flagged))
    return {
        "jobs": jobs,
        "pending": list(flagged),
        "results": results,
        "flagged": [],
        "revision_count": revision_count + 1,
    }
