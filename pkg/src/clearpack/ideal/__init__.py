"""Idealness engine: relaxation polytopes, exact vertex enumeration, the
penalty-maximization MILP, dependence covers, and sampling campaigns."""

from .campaign import (
    CampaignReport,
    IdealnessReport,
    check_pairwise_ideal,
    margin_state,
    parametric_campaign,
    sample_free_params,
    sample_pair_params,
)
from .covers import Circuit, CoverFamily, UnsupportedFormulationError, known_covers, verify_cover
from .penalty import (
    PenaltyOutcome,
    build_penalty_milp,
    polytope_boxes,
    solve_penalty_program,
)
from .relax import RelaxationPolytope, relax
from .separation import NotDeficientError, separate_circuit
from .vertices import (
    ExtremePoint,
    find_fractional_vertex,
    OutOfRangeError,
    TooManyVariablesError,
    enumerate_extreme_points,
    max_penalty,
    penalty,
    tight_rank,
)

__all__ = [
    "CampaignReport",
    "IdealnessReport",
    "check_pairwise_ideal",
    "margin_state",
    "parametric_campaign",
    "sample_free_params",
    "sample_pair_params",
    "Circuit",
    "CoverFamily",
    "UnsupportedFormulationError",
    "known_covers",
    "verify_cover",
    "PenaltyOutcome",
    "build_penalty_milp",
    "polytope_boxes",
    "solve_penalty_program",
    "RelaxationPolytope",
    "relax",
    "NotDeficientError",
    "separate_circuit",
    "ExtremePoint",
    "find_fractional_vertex",
    "OutOfRangeError",
    "TooManyVariablesError",
    "enumerate_extreme_points",
    "max_penalty",
    "penalty",
    "tight_rank",
]
