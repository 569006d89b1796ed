"""Reduced, projection-corrected CBC construction of rank-1 lattice rules
in weighted Korobov spaces of prime-power order."""

from .bounds import (
    BoundInputs,
    BoundReport,
    bound_report,
    lambda_interval,
    optimize_lambda,
    theorem1_bound,
    theorem2_bound,
)
from .cbc import (
    ConstructionResult,
    EmptyCandidateSetError,
    ExclusionPolicy,
    cbc_step_naive,
    construct,
    exclusion_next,
)
from .diagnostics import WorkCounters, cost_audit, projection_report
from .fast import ProductVector, fold_products, sweep_errors_direct, sweep_errors_fft, update_products
from .korobov import (
    LatticeParams,
    dual_lattice_error_truncated,
    omega,
    omega_table,
    prefix_errors,
    r_alpha_1d,
    r_alpha_prod,
    squared_error,
)
from .reduction import ReductionSchedule, SearchSpace, parse_schedule, reduced_space, search_space, thresholds

__version__ = "0.1.0"

__all__ = [
    "BoundInputs",
    "BoundReport",
    "ConstructionResult",
    "EmptyCandidateSetError",
    "ExclusionPolicy",
    "LatticeParams",
    "ProductVector",
    "ReductionSchedule",
    "SearchSpace",
    "WorkCounters",
    "bound_report",
    "cbc_step_naive",
    "construct",
    "cost_audit",
    "dual_lattice_error_truncated",
    "exclusion_next",
    "fold_products",
    "lambda_interval",
    "omega",
    "omega_table",
    "optimize_lambda",
    "parse_schedule",
    "prefix_errors",
    "projection_report",
    "r_alpha_1d",
    "r_alpha_prod",
    "reduced_space",
    "search_space",
    "squared_error",
    "sweep_errors_direct",
    "sweep_errors_fft",
    "theorem1_bound",
    "theorem2_bound",
    "thresholds",
    "update_products",
]
