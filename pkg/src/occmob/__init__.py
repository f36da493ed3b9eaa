"""occmob: intergenerational occupational mobility decomposition.

Splits an observed three-class transition matrix P into a structural part R
(mobility forced by the changing class structure) and a true part Q
(incentive-driven mobility), identifies the threshold model behind Q,
computes mobility indexes with bootstrap standard errors, and simulates the
model forward for validation. See README.md for the file formats and the
command-line interface.
"""

__version__ = "0.1.0"

from ._kernels import available_backends, backend, set_backend
from .errors import (
    DataError,
    DecompositionError,
    DegenerateSupportError,
    EmptyClassError,
    InvalidParamsError,
    InvalidPrimitivesError,
    MobilityError,
    NonIdentifiableError,
    NotStochasticError,
    UndefinedIndexError,
)
from .model import (
    ClassShares,
    MobilityIndexes,
    ModelParams,
    OccClass,
    Primitives,
    Thresholds,
    as_shares,
    as_transition_matrix,
    identify_params,
    lack_of_incentive_index,
    mobility_indexes,
    opportunity_index,
    pis_matrix,
    pms_matrix,
    thresholds_from_primitives,
    build_true_matrix,
    i_true_from_params,
)
from .lp import LinearProgram, LpSolution, solve_lp
from .dataio import (
    DEFAULT_COHORTS,
    CohortSpec,
    IncomeRecord,
    MicroRecord,
    ParseReport,
    TransitionCounts,
    aggregate_counts,
    parse_cohorts,
    parse_income_csv,
    parse_micro_csv,
    read_matrix_csv,
    read_report,
    write_income_csv,
    write_micro_counts,
    write_micro_csv,
    write_report,
)
from .estimation import (
    BootstrapSummary,
    Decomposition,
    PremiaReport,
    amend_decomposition,
    bootstrap,
    decompose,
    estimate_p,
    income_premia,
    premium_interpretation,
    shares_from_counts,
    solve_r,
)
from .simulate import (
    Agent,
    SimConfig,
    allocate_fathers,
    choose_class,
    draw_theta,
    params_from_primitives,
    simulate_agents,
    simulate_cohort,
    simulate_incomes,
)

__all__ = [
    "__version__",
    "backend",
    "available_backends",
    "set_backend",
    # errors
    "MobilityError",
    "InvalidPrimitivesError",
    "InvalidParamsError",
    "DegenerateSupportError",
    "NonIdentifiableError",
    "NotStochasticError",
    "UndefinedIndexError",
    "DecompositionError",
    "EmptyClassError",
    "DataError",
    # model
    "OccClass",
    "Primitives",
    "Thresholds",
    "ModelParams",
    "MobilityIndexes",
    "ClassShares",
    "as_transition_matrix",
    "as_shares",
    "thresholds_from_primitives",
    "build_true_matrix",
    "identify_params",
    "mobility_indexes",
    "i_true_from_params",
    "opportunity_index",
    "lack_of_incentive_index",
    "pms_matrix",
    "pis_matrix",
    # lp
    "LinearProgram",
    "LpSolution",
    "solve_lp",
    # data io
    "MicroRecord",
    "IncomeRecord",
    "CohortSpec",
    "TransitionCounts",
    "ParseReport",
    "DEFAULT_COHORTS",
    "parse_micro_csv",
    "parse_income_csv",
    "parse_cohorts",
    "aggregate_counts",
    "read_matrix_csv",
    "read_report",
    "write_report",
    "write_micro_csv",
    "write_micro_counts",
    "write_income_csv",
    # estimation
    "Decomposition",
    "BootstrapSummary",
    "PremiaReport",
    "estimate_p",
    "shares_from_counts",
    "solve_r",
    "amend_decomposition",
    "decompose",
    "bootstrap",
    "income_premia",
    "premium_interpretation",
    # simulator
    "SimConfig",
    "Agent",
    "params_from_primitives",
    "allocate_fathers",
    "draw_theta",
    "choose_class",
    "simulate_cohort",
    "simulate_agents",
    "simulate_incomes",
]
