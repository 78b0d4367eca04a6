"""Closed-form nearest-mixture solvers.

Given a target Bloch vector and a finite state set, find the convex mixture
of set members closest in trace distance.  Sets of one to four states are
solved in closed form by active-set case analysis of the KKT conditions of
the convex quadratic; larger sets reduce to enumeration of subsets whose
size equals the rank of the 4 x N decomposition matrix (Bloch rows plus an
all-ones row), since that rank bounds the support of an optimal mixture.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import combinations

import numpy as np

from .bloch import ContractError, as_bloch, state_array

# Pseudo-weights within this band of [0, 1] count as feasible and are clamped.
FEASIBILITY_TOL = 1e-9

# Candidate subsets whose distances agree within this tolerance are resolved
# to the lexicographically smallest index tuple.
TIE_TOL = 1e-10

# Default relative singular-value cutoff for numerical rank.
RANK_TOL = 1e-9

# Squared edge length below which a pair of states counts as coincident.
COINCIDENT_TOL = 1e-24


class Branch(Enum):
    """Which case of the active-set analysis produced a result."""

    INTERIOR = "Interior"
    CLAMP_LOW = "ClampLow"
    CLAMP_HIGH = "ClampHigh"
    TRIPLE_INTERIOR = "TripleInterior"
    PAIR_FALLBACK = "PairFallback"
    QUAD_EXACT = "QuadExact"
    TRIPLE_FALLBACK = "TripleFallback"
    SUBSET_ENUM = "SubsetEnum"
    # Produced by the numerical oracle, never by the closed-form solvers.
    NUMERIC = "Numeric"


@dataclass
class KKTDiagnostics:
    """Multipliers and residuals certifying optimality of a weight vector.

    lam is the multiplier of the sum-to-one constraint, lam_i the multipliers
    of the nonnegativity constraints, reconstructed from the objective
    gradient g via lam = -p.g and lam_i = max(g_i + lam, 0).  At an exact
    optimum both residuals vanish.
    """

    lam: float
    lam_i: np.ndarray
    stationarity_residual: float
    complementarity_residual: float
    degenerate_optimum: bool = False


@dataclass
class ApproximationResult:
    """Optimal weights and distance for one solved instance."""

    weights: np.ndarray
    distance: float
    support: tuple
    branch: Branch
    pseudo_probabilities: np.ndarray | None
    diagnostics: KKTDiagnostics


def decomposition_matrix(s) -> np.ndarray:
    """4 x N matrix whose columns are [Bloch vector; 1] per state."""
    arr = state_array(s)
    return np.vstack([arr.T, np.ones(arr.shape[0])])


def matrix_rank(A, tol: float = RANK_TOL) -> int:
    """Numerical rank: count of singular values above tol * sigma_max."""
    sigma = np.linalg.svd(np.asarray(A, dtype=float), compute_uv=False)
    if sigma.size == 0 or sigma[0] == 0.0:
        return 0
    return int(np.count_nonzero(sigma > tol * sigma[0]))


def _kkt(p: np.ndarray, r_o: np.ndarray, arr: np.ndarray,
         degenerate: bool = False) -> KKTDiagnostics:
    g = 2.0 * (arr @ (arr.T @ p - r_o))
    lam = -float(p @ g)
    reduced = g + lam
    lam_i = np.maximum(reduced, 0.0)
    stationarity = float(np.max(lam_i - reduced))
    complementarity = float(np.max(np.abs(lam_i * p)))
    return KKTDiagnostics(lam, lam_i, stationarity, complementarity, degenerate)


def _finalize(p: np.ndarray, distance: float, branch: Branch, r_o: np.ndarray,
              arr: np.ndarray, pseudo: np.ndarray | None = None,
              degenerate: bool = False) -> ApproximationResult:
    support = tuple(int(i) for i in np.flatnonzero(p > 0.0))
    diag = _kkt(p, r_o, arr, degenerate)
    return ApproximationResult(p, float(distance), support, branch, pseudo, diag)


def kkt_residual(res: ApproximationResult, r_o, s) -> KKTDiagnostics:
    """Recompute the multipliers and residuals of a result on the full set."""
    return _kkt(np.asarray(res.weights, dtype=float), as_bloch(r_o), state_array(s))


def solve_pair(r_o, r1, r2) -> ApproximationResult:
    """Best mixture of two states.

    Projects the target onto the segment between the states; when the
    unconstrained coefficient leaves [0, 1] the optimum clamps to the nearer
    endpoint (g < 0 keeps only the second state, g > h only the first, with
    g the target-edge inner product and h the squared edge length).
    """
    r_o = as_bloch(r_o)
    r1 = as_bloch(r1)
    r2 = as_bloch(r2)
    arr = np.array([r1, r2])
    edge = r1 - r2
    h = float(edge @ edge)
    if h <= COINCIDENT_TOL:
        # Coincident states: a single-state answer is the only one available.
        p = np.array([1.0, 0.0])
        d = r_o - r1
        return _finalize(p, np.sqrt(d @ d), Branch.CLAMP_HIGH, r_o, arr)
    g = float((r_o - r2) @ edge)
    if g < 0.0:
        p = np.array([0.0, 1.0])
        d = r_o - r2
        return _finalize(p, np.sqrt(d @ d), Branch.CLAMP_LOW, r_o, arr)
    if g > h:
        p = np.array([1.0, 0.0])
        d = r_o - r1
        return _finalize(p, np.sqrt(d @ d), Branch.CLAMP_HIGH, r_o, arr)
    t = g / h
    p = np.array([t, 1.0 - t])
    d = r_o - r2
    dist_sq = float(d @ d) - g * g / h
    return _finalize(p, np.sqrt(max(dist_sq, 0.0)), Branch.INTERIOR, r_o, arr)


def solve_orthonormal_pair(r_o, r1, r2) -> ApproximationResult:
    """Best mixture of two antipodal pure states (an orthonormal basis).

    For r1 = -r2 on the sphere the interior branch always applies and the
    optimum simplifies to D^2 = |r_o|^2 - (r_o.r_i)^2 with weights
    p_i = (1 + r_o.r_i)/2; the squared distance is the coherence of the
    target with respect to that basis.
    """
    r_o = as_bloch(r_o)
    r1 = as_bloch(r1)
    r2 = as_bloch(r2)
    dot = float(r1 @ r2)
    if abs(dot + 1.0) > 1e-9:
        raise ContractError(
            f"states are not antipodal pure states (r1.r2 = {dot!r})"
        )
    arr = np.array([r1, r2])
    proj = float(r_o @ r1)
    dist_sq = float(r_o @ r_o) - proj * proj
    p = np.array([0.5 * (1.0 + proj), 0.5 * (1.0 - proj)])
    return _finalize(p, np.sqrt(max(dist_sq, 0.0)), Branch.INTERIOR, r_o, arr)


def _best_pair_of_three(r_o: np.ndarray, arr: np.ndarray,
                        pseudo: np.ndarray | None) -> ApproximationResult:
    best = None
    best_w = None
    for i, j in ((0, 1), (0, 2), (1, 2)):
        sub = solve_pair(r_o, arr[i], arr[j])
        if best is None or sub.distance < best.distance - TIE_TOL:
            best = sub
            best_w = np.zeros(3)
            best_w[i], best_w[j] = sub.weights
    return _finalize(best_w, best.distance, Branch.PAIR_FALLBACK, r_o, arr, pseudo)


def solve_triple(r_o, r1, r2, r3) -> ApproximationResult:
    """Best mixture of three states.

    Solves the stationarity system on the affine hull of the three states
    for pseudo-weights.  If they are feasible the mixture is the interior
    optimum; otherwise (or when the states are collinear, detected by a
    vanishing Gram determinant) the optimum sits on one of the three pairs
    and the best pair wins, lexicographically smallest on ties.
    """
    r_o = as_bloch(r_o)
    r1 = as_bloch(r1)
    r2 = as_bloch(r2)
    r3 = as_bloch(r3)
    arr = np.array([r1, r2, r3])
    a = r1 - r2
    b = r3 - r2
    h1 = float(a @ a)
    h2 = float(b @ b)
    ab = float(a @ b)
    gram_det = h1 * h2 - ab * ab
    if abs(gram_det) <= 1e-12 * max(1.0, h1 * h2):
        return _best_pair_of_three(r_o, arr, None)
    e13 = r1 - r3
    e23 = r2 - r3
    system = np.array([arr @ e13, arr @ e23, np.ones(3)])
    rhs = np.array([float(r_o @ e13), float(r_o @ e23), 1.0])
    try:
        pseudo = np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError:
        return _best_pair_of_three(r_o, arr, None)
    if np.all(pseudo >= -FEASIBILITY_TOL) and np.all(pseudo <= 1.0 + FEASIBILITY_TOL):
        p = np.clip(pseudo, 0.0, 1.0)
        p /= p.sum()
        d = r_o - arr.T @ p
        return _finalize(p, np.sqrt(max(float(d @ d), 0.0)),
                         Branch.TRIPLE_INTERIOR, r_o, arr, pseudo)
    return _best_pair_of_three(r_o, arr, pseudo)


def solve_quad_full_rank(r_o, s) -> ApproximationResult:
    """Best mixture of four states whose decomposition matrix has rank 4.

    Full rank makes [r_o; 1] = A p uniquely solvable; feasible pseudo-weights
    give an exact construction (distance 0).  Otherwise the optimum drops to
    a face and the best of the four 3-subsets wins.
    """
    r_o = as_bloch(r_o)
    arr = state_array(s)
    if arr.shape[0] != 4:
        raise ContractError(f"expected 4 states, got {arr.shape[0]}")
    A = decomposition_matrix(arr)
    if matrix_rank(A) < 4:
        raise ContractError(
            "decomposition matrix has rank < 4; use solve(), which "
            "enumerates rank-sized subsets"
        )
    pseudo = np.linalg.solve(A, np.append(r_o, 1.0))
    if np.all(pseudo >= -FEASIBILITY_TOL) and np.all(pseudo <= 1.0 + FEASIBILITY_TOL):
        p = np.clip(pseudo, 0.0, 1.0)
        p /= p.sum()
        d = r_o - arr.T @ p
        return _finalize(p, np.sqrt(max(float(d @ d), 0.0)),
                         Branch.QUAD_EXACT, r_o, arr, pseudo)
    best = None
    best_w = None
    for idx in combinations(range(4), 3):
        sub = solve_triple(r_o, *arr[list(idx)])
        if best is None or sub.distance < best.distance - TIE_TOL:
            best = sub
            best_w = np.zeros(4)
            best_w[list(idx)] = sub.weights
    return _finalize(best_w, best.distance, Branch.TRIPLE_FALLBACK, r_o, arr, pseudo)


def _solve_subset(r_o: np.ndarray, sub: np.ndarray) -> ApproximationResult:
    k = sub.shape[0]
    if k == 1:
        d = r_o - sub[0]
        return _finalize(np.array([1.0]), np.sqrt(float(d @ d)),
                         Branch.CLAMP_HIGH, r_o, sub)
    if k == 2:
        return solve_pair(r_o, sub[0], sub[1])
    if k == 3:
        return solve_triple(r_o, sub[0], sub[1], sub[2])
    if matrix_rank(decomposition_matrix(sub)) == 4:
        return solve_quad_full_rank(r_o, sub)
    # Rank-deficient quadruple: its optimum lives on one of its triples.
    best = None
    best_w = None
    for idx in combinations(range(4), 3):
        t = solve_triple(r_o, *sub[list(idx)])
        if best is None or t.distance < best.distance - TIE_TOL:
            best = t
            best_w = np.zeros(4)
            best_w[list(idx)] = t.weights
    return _finalize(best_w, best.distance, Branch.TRIPLE_FALLBACK, r_o, sub)


def solve(r_o, s) -> ApproximationResult:
    """Best convex mixture of an arbitrary state set.

    Dispatches to the closed-form routine for N <= 3 and for full-rank
    quadruples.  Otherwise the rank R of the decomposition matrix bounds the
    optimal support, so the minimum over all R-subsets (each solved in
    closed form) is the global optimum.  Ties within TIE_TOL resolve to the
    lexicographically smallest index tuple; returned weights always have
    length N.
    """
    r_o = as_bloch(r_o)
    arr = state_array(s)
    n = arr.shape[0]
    if n == 0:
        raise ContractError("cannot approximate with an empty state set")
    if n == 1:
        d = r_o - arr[0]
        return _finalize(np.array([1.0]), np.sqrt(float(d @ d)),
                         Branch.CLAMP_HIGH, r_o, arr)
    if n == 2:
        return solve_pair(r_o, arr[0], arr[1])
    if n == 3:
        return solve_triple(r_o, arr[0], arr[1], arr[2])
    rank = matrix_rank(decomposition_matrix(arr))
    if n == 4 and rank == 4:
        return solve_quad_full_rank(r_o, arr)
    best = None
    best_idx = None
    for idx in combinations(range(n), rank):
        sub = _solve_subset(r_o, arr[list(idx)])
        if best is None or sub.distance < best.distance - TIE_TOL:
            best = sub
            best_idx = idx
    w = np.zeros(n)
    w[list(best_idx)] = best.weights
    return _finalize(w, best.distance, Branch.SUBSET_ENUM, r_o, arr)
