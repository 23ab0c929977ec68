"""Infrastructure-stressing client revelation and fuzzy segment recommendations."""

__version__ = "0.1.0"

from .campaign_sim import CampaignReport, CampaignSpec, compute_alpha, simulate, validate_recommendation
from .data_model import CdrEvent, CellRecord, ClientRecord, Dataset, parse_dataset, remove_clients, write_dataset
from .estimators import CampaignValidator, ISRevealer, LoadAssessor, SegmentRanker
from .fuzzy_engine import (
    Hedge,
    SegmentMembership,
    Tier,
    antenna_load,
    apply_hedge,
    classify,
    infrastructure_load,
    negate,
    query,
    rank_segments,
    select_context,
)
from .is_revelation import RevelationConfig, is_frequency_by_segment, reveal_is
from .lp_solver import LpProblem, ScalingSolution, oracle_solve, solve
from .occupancy import FootprintTensor, OccupancyMatrix, build_footprint, build_occupancy, hotspot_score, rank_clients

__all__ = [name for name in dir() if not name.startswith("_")]
