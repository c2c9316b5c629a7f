from typing import Dict, List, TypedDict

from ..config import SimConfig
from ..link import LinkSetup
from ..records import BerRecord


class SweepJob(TypedDict):
    index: int  # position in config order: cluster-major, then Eb/N0 grid
    l_index: int
    n_clusters: int
    grid_index: int
    ebn0_db: float
    max_frames: int
    min_bit_errors: int


class SweepState(TypedDict, total=False):
    sim_config: SimConfig
    links: Dict[int, LinkSetup]  # keyed by cluster count L
    partition_betas: Dict[int, float]
    ambiguous_clusters: List[int]  # L values whose partition has a full-height sidelobe
    jobs: List[SweepJob]
    pending: List[int]  # job indices the simulator still has to run
    results: Dict[int, BerRecord]  # job index -> record
    flagged: List[int]  # job indices the reviewer wants re-run with a larger budget
    records: List[BerRecord]  # results in config order
    csv_text: str
    manifest_text: str
    feedback: str
    revision_count: int
