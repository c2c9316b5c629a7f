import logging

from ..records import BER_HEADER, format_csv
from ..reporting import package_versions, render
from .state import SweepState

logger = logging.getLogger(__name__)


def assembler_node(state: SweepState):
    logger.info("--- ASSEMBLER NODE ---")
    config = state["sim_config"]
    results = state.get("results", {})
    # config order regardless of completion order
    records = [results[index] for index in sorted(results)]
    csv_text = format_csv(BER_HEADER, records)

    any_link = next(iter(state["links"].values()))
    manifest_text = render(
        "manifest.txt.j2",
        config=config,
        profile=any_link.profile,
        n_unoccupied=any_link.partition.n_unoccupied,
        partition_betas=state.get("partition_betas", {}),
        ambiguous_clusters=state.get("ambiguous_clusters", []),
        revision_count=state.get("revision_count", 0),
        feedback=state.get("feedback", "pending"),
        versions=package_versions(),
    )
    return {"records": records, "csv_text": csv_text, "manifest_text": manifest_text}
