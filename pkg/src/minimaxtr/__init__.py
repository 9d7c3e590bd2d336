"""Trust-region algorithms for smooth nonconvex-strongly-concave minimax
optimization, with first-order and cubic-regularized baselines and a
reproducible benchmark harness."""

from .baselines import GdaConfig, McnConfig, run_gda, run_mcn
from .benchmarks import (
    DuFunctionParams,
    RegionIndex,
    build_convex_quartic_minimax,
    build_du_minimax,
    build_quadratic_minimax,
    classify_region,
    du_default_x0,
    du_stationary_catalog,
    du_value_grad_hess,
    quadratic_minimax,
)
from .inner import (
    AscentBudgetError,
    AscentSchedule,
    ConsistencyStallError,
    ConsistentAscent,
    ascend,
    ascend_consistent,
    consistency_bound,
    schedule_counts,
)
from .minimax_tr import SspCertificate, TrConfig, run_minimax_tr
from .problem import (
    AnalyticOracle,
    ConcavityError,
    MinimaxProblem,
    PrimalDualPoint,
    ProblemConstants,
    derive_constants,
    finite_difference_check,
    schur_hessian,
)
from .records import CSV_COLUMNS, IterationRecord, read_trajectory_csv, write_trajectory_csv
from .trace import (
    StepClass,
    TraceConfig,
    TraceState,
    classify,
    compute_rho,
    contract,
    run_minimax_trace,
    trace_update,
)
from .trs import (
    IndefiniteShiftError,
    LambdaSearchResult,
    RangeSearchError,
    TrsSolution,
    find_lambda_in_range,
    solve_cubic,
    solve_shifted,
    solve_trs,
)

__all__ = [
    "AnalyticOracle",
    "AscentBudgetError",
    "AscentSchedule",
    "ConcavityError",
    "ConsistencyStallError",
    "ConsistentAscent",
    "CSV_COLUMNS",
    "DuFunctionParams",
    "GdaConfig",
    "IndefiniteShiftError",
    "IterationRecord",
    "LambdaSearchResult",
    "McnConfig",
    "MinimaxProblem",
    "PrimalDualPoint",
    "ProblemConstants",
    "RangeSearchError",
    "RegionIndex",
    "SspCertificate",
    "StepClass",
    "TrConfig",
    "TraceConfig",
    "TraceState",
    "TrsSolution",
    "ascend",
    "ascend_consistent",
    "build_convex_quartic_minimax",
    "build_du_minimax",
    "build_quadratic_minimax",
    "classify",
    "classify_region",
    "compute_rho",
    "consistency_bound",
    "contract",
    "derive_constants",
    "du_default_x0",
    "du_stationary_catalog",
    "du_value_grad_hess",
    "find_lambda_in_range",
    "finite_difference_check",
    "quadratic_minimax",
    "read_trajectory_csv",
    "run_gda",
    "run_mcn",
    "run_minimax_tr",
    "run_minimax_trace",
    "schedule_counts",
    "schur_hessian",
    "solve_cubic",
    "solve_shifted",
    "solve_trs",
    "trace_update",
    "write_trajectory_csv",
]

__version__ = "0.1.0"
