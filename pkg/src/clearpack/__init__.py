"""clearpack: exact-arithmetic rectangle strip packing with clearances.

Builds the four mixed-binary embeddings of the pairwise non-overlap
disjunction, solves them with an exact rational simplex and branch and
bound, and mechanically proves or refutes pairwise-idealness by extreme
point enumeration, dependence-cover certificates, and a penalty-maximizing
MILP.
"""

__version__ = "0.1.0"

from .linalg import RatMatrix, Rational, SingularMatrixError, nullspace_vector, rank, rat, solve_square
from .packing import (
    DerivedParams,
    GenConfig,
    Instance,
    ObjectSpec,
    PackingSolution,
    Region,
    derive_parameters,
    generate_instance,
    greedy_initial_layout,
    instance_from_json,
    instance_to_json,
    validate_layout,
)
from .formulations import (
    FormulationOptions,
    MBLPModel,
    add_sequence_pair,
    bcf_bar,
    bcf_tilde,
    branching_priorities,
    build_ru,
    build_sbl,
    build_sbm,
    build_strip_packing,
    build_su,
)
from .lptext import export_lp_text, parse_lp_text
from .solver import BnBResult, SolveOptions, disjunction_oracle, solve_lp, solve_milp

__all__ = [
    "__version__",
    "RatMatrix",
    "Rational",
    "SingularMatrixError",
    "nullspace_vector",
    "rank",
    "rat",
    "solve_square",
    "DerivedParams",
    "GenConfig",
    "Instance",
    "ObjectSpec",
    "PackingSolution",
    "Region",
    "derive_parameters",
    "generate_instance",
    "greedy_initial_layout",
    "instance_from_json",
    "instance_to_json",
    "validate_layout",
    "FormulationOptions",
    "MBLPModel",
    "add_sequence_pair",
    "bcf_bar",
    "bcf_tilde",
    "branching_priorities",
    "build_ru",
    "build_sbl",
    "build_sbm",
    "build_strip_packing",
    "build_su",
    "export_lp_text",
    "parse_lp_text",
    "BnBResult",
    "SolveOptions",
    "disjunction_oracle",
    "solve_lp",
    "solve_milp",
]
