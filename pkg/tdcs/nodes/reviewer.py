import logging
from itertools import groupby

from .state import SweepState

logger = logging.getLogger(__name__)

# Points with fewer errors are too noisy to call a BER increase.
MIN_ERRORS_FOR_MONOTONICITY = 50


def reviewer_node(state: SweepState):
    logger.info("--- REVIEWER NODE ---")
    jobs = state["jobs"]
    results = state.get("results", {})

    flagged, issues = set(), []
    ordered = sorted(results, key=lambda i: (jobs[i]["l_index"], jobs[i]["ebn0_db"]))
    for _, group in groupby(ordered, key=lambda i: jobs[i]["l_index"]):
        indices = list(group)
        for lo, hi in zip(indices, indices[1:]):
            a, b = results[lo], results[hi]
            if min(a.bit_errors, b.bit_errors) < MIN_ERRORS_FOR_MONOTONICITY:
                continue
            if b.ber > a.ber:
                flagged.update((lo, hi))
                issues.append(
                    f"L={a.n_clusters}: BER rises from {a.ber:.3e} at {a.ebn0_db:g} dB to {b.ber:.3e} at {b.ebn0_db:g} dB"
                )
        # Stopped on the frame budget with some errors but short of the target.
        # Error-free points are not re-run.
        for i in indices:
            record, job = results[i], jobs[i]
            if 0 < record.bit_errors < job["min_bit_errors"]:
                flagged.add(i)
                issues.append(
                    f"L={record.n_clusters}: only {record.bit_errors} bit errors at {record.ebn0_db:g} dB after {record.frames} frames"
                )

    if not flagged:
        return {"feedback": "APPROVED", "flagged": []}
    feedback = "; ".join(issues)
    logger.warning("review rejected: %s", feedback)
    return {"feedback": feedback, "flagged": sorted(flagged)}
