from .gathers import (
    CenterIndex,
    phase1c_gather,
    phase2b_gather_centers,
    phase3a_gather_hashes,
)
from .hashing import edge_hash, edge_sort_key, keeps_edge
from .phases import (
    phase1a_degrees,
    phase1b_wedges_per_bin,
    phase2a_select_centers,
    phase2c_create_wedges,
    phase3b_check_closure,
    phase4a_first_degree,
    phase4ab_join_endpoint_degrees,
    phase4b_second_degree,
    phase4c_summarize,
)
from .runner import PipelineResult, VolumeCheck, WedgeSamplingPipeline
from .sampling import exhaustive_pairs, round_budget, sampling_subroutine

__all__ = [
    "CenterIndex",
    "PipelineResult",
    "VolumeCheck",
    "WedgeSamplingPipeline",
    "edge_hash",
    "edge_sort_key",
    "exhaustive_pairs",
    "keeps_edge",
    "phase1a_degrees",
    "phase1b_wedges_per_bin",
    "phase1c_gather",
    "phase2a_select_centers",
    "phase2b_gather_centers",
    "phase2c_create_wedges",
    "phase3a_gather_hashes",
    "phase3b_check_closure",
    "phase4a_first_degree",
    "phase4ab_join_endpoint_degrees",
    "phase4b_second_degree",
    "phase4c_summarize",
    "round_budget",
    "sampling_subroutine",
]
