"""Closest convex mixtures of qubit states under trace distance.

Closed-form solvers for the nearest mixture of a finite qubit state set to
a target state, support reduction to at most four states, analytic
shortcuts for Pauli eigenstate sets, and an independent numerical oracle
that validates everything.
"""

from .bloch import (
    STATE_TOL,
    ContractError,
    StateSet,
    TargetParams,
    ValidationError,
    as_bloch,
    bloch_from_params,
    hessian,
    is_pure,
    mix,
    mixture_distance_sq,
    params_from_bloch,
    trace_distance,
)
from .caratheodory import Decomposition
from .fixtures import fixture, fixture_names
from .oracle import OracleConfig, OracleError, grid_solve, oracle_solve, simplex_project
from .pauli import (
    PauliProblem,
    PauliStateSpec,
    six_state_solution,
    solve_case1,
    solve_case2,
    solve_case3,
    solve_case4,
    symmetry_reduce,
)
from .solver import (
    ApproximationResult,
    Branch,
    KKTDiagnostics,
    decomposition_matrix,
    kkt_residual,
    matrix_rank,
    solve,
    solve_orthonormal_pair,
    solve_pair,
    solve_quad_full_rank,
    solve_triple,
)

__all__ = [
    "ApproximationResult",
    "Branch",
    "ContractError",
    "Decomposition",
    "KKTDiagnostics",
    "OracleConfig",
    "OracleError",
    "PauliProblem",
    "PauliStateSpec",
    "STATE_TOL",
    "StateSet",
    "TargetParams",
    "ValidationError",
    "as_bloch",
    "bloch_from_params",
    "decomposition_matrix",
    "fixture",
    "fixture_names",
    "grid_solve",
    "hessian",
    "is_pure",
    "kkt_residual",
    "matrix_rank",
    "mix",
    "mixture_distance_sq",
    "oracle_solve",
    "params_from_bloch",
    "simplex_project",
    "six_state_solution",
    "solve",
    "solve_case1",
    "solve_case2",
    "solve_case3",
    "solve_case4",
    "solve_orthonormal_pair",
    "solve_pair",
    "solve_quad_full_rank",
    "solve_triple",
    "symmetry_reduce",
    "trace_distance",
]
