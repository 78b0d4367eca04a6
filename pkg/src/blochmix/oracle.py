"""Independent numerical minimizer of the mixture distance over the simplex.

Used to validate every closed-form result.  The objective is the convex
quadratic ||r_o - R p||^2 in the weights p, minimized by projected gradient
descent with fixed step 1/L (L the largest curvature eigenvalue) from the
uniform weight vector, plus an exhaustive grid mode for N <= 3 that
cross-checks the descent path with brute force.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bloch import ContractError, as_bloch, state_array
from .solver import ApproximationResult, Branch, _kkt

# Weights above this count toward the reported support of a numeric result.
SUPPORT_TOL = 1e-12

# Descent stops early once the convexity gap max_j grad.(p - e_j) certifies
# the iterate is globally optimal to well below the acceptance tolerances.
GAP_TOL = 1e-13


class OracleError(RuntimeError):
    """The numerical minimizer failed to converge; never a silent answer."""


@dataclass
class OracleConfig:
    max_iterations: int = 100_000
    step_rule: str = "fixed"  # "fixed" (1/L) or "backtracking"
    convergence_tol: float = 1e-12  # successive objective change
    grid_resolution: int = 2000  # subdivisions per axis in exhaustive mode

    def __post_init__(self):
        if self.max_iterations <= 0:
            raise ValueError("max_iterations must be positive")
        if self.step_rule not in ("fixed", "backtracking"):
            raise ValueError(f"unknown step rule {self.step_rule!r}")
        if self.convergence_tol <= 0.0:
            raise ValueError("convergence_tol must be positive")
        if self.grid_resolution <= 0:
            raise ValueError("grid_resolution must be positive")


def simplex_project(v) -> np.ndarray:
    """Euclidean projection onto {p : p_i >= 0, sum p_i = 1}.

    Sort-and-threshold algorithm; already-feasible inputs come back
    unchanged (the threshold is exactly zero for them).
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size == 0 or not np.all(np.isfinite(v)):
        raise ContractError("simplex projection needs a finite 1-D vector")
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    j = np.arange(1, v.size + 1)
    rho = int(np.flatnonzero(u - (css - 1.0) / j > 0.0)[-1])
    theta = (css[rho] - 1.0) / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


def _quadratic(r_o: np.ndarray, arr: np.ndarray):
    H = 2.0 * (arr @ arr.T)
    c = 2.0 * (arr @ r_o)
    const = float(r_o @ r_o)
    return H, c, const


def objective_value(r_o, s, p) -> float:
    """Squared mixture distance as the quadratic form used by the descent."""
    r_o = as_bloch(r_o)
    arr = state_array(s)
    H, c, const = _quadratic(r_o, arr)
    p = np.asarray(p, dtype=float)
    return 0.5 * float(p @ (H @ p)) - float(c @ p) + const


def objective_gradient(r_o, s, p) -> np.ndarray:
    """Analytic gradient H p - c of the squared mixture distance."""
    r_o = as_bloch(r_o)
    arr = state_array(s)
    H, c, _ = _quadratic(r_o, arr)
    return H @ np.asarray(p, dtype=float) - c


def _face_optimum(H, c, p, threshold):
    """Descend from the iterate p to a face minimizer, staying feasible.

    Repeatedly takes the minimum-norm Newton step toward the minimizer of
    the quadratic on the current support's sum-to-one affine set; when the
    step leaves the simplex, a ratio test stops at the first blocking
    weight, which is zeroed and removed from the support.  Nearly flat
    curvature directions make the unconstrained minimizer land far outside
    the simplex, and the ratio test is what identifies the exit face
    reliably there.  Returns None when no support survives.
    """
    support = np.flatnonzero(p > threshold)
    if support.size == 0:
        return None
    x = p[support]
    total = x.sum()
    if total <= 0.0:
        return None
    x = x / total
    while True:
        k = support.size
        if k == 1:
            q = np.zeros_like(p)
            q[support[0]] = 1.0
            return q
        _, _, vt = np.linalg.svd(np.ones((1, k)))
        span = vt[1:].T  # orthonormal basis of the sum-zero subspace
        h_s = H[np.ix_(support, support)]
        grad = h_s @ x - c[support]
        curv = span.T @ h_s @ span
        y, *_ = np.linalg.lstsq(curv, -(span.T @ grad), rcond=None)
        d = span @ y
        shrinking = d < -1e-15
        if not np.any(shrinking):
            step = 1.0
            block = None
        else:
            ratios = x[shrinking] / -d[shrinking]
            hit = int(np.argmin(ratios))
            step = float(ratios[hit])
            block = int(np.flatnonzero(shrinking)[hit]) if step < 1.0 else None
            step = min(step, 1.0)
        x = np.clip(x + step * d, 0.0, None)
        x /= x.sum()
        if block is None:
            q = np.zeros_like(p)
            q[support] = x
            return q
        x[block] = 0.0
        support = np.delete(support, block)
        x = np.delete(x, block)
        total = x.sum()
        if total <= 0.0:
            return None
        x = x / total


def _pgd(H, c, const, cfg: OracleConfig, record=None):
    n = H.shape[0]
    p = np.full(n, 1.0 / n)

    def value(q):
        return 0.5 * float(q @ (H @ q)) - float(c @ q) + const

    def certified(q, f_q, f_ref):
        # Global-optimality certificate from convexity: the gap bounds f - f*.
        if f_q > f_ref + 1e-15:
            return False
        grad_q = H @ q - c
        return float(q @ grad_q) - float(grad_q.min()) <= GAP_TOL

    f = value(p)
    if record is not None:
        record.append(f)
    L = float(np.linalg.eigvalsh(H)[-1])
    if L <= 1e-30:
        # All states at the origin: the objective is constant.
        return p, f, 0, True, 0.0
    step = 1.0 / L
    max_increase = 0.0
    for it in range(1, cfg.max_iterations + 1):
        grad = H @ p - c
        gap = float(p @ grad) - float(grad.min())
        if gap <= GAP_TOL:
            return p, f, it - 1, True, max_increase
        if cfg.step_rule == "fixed":
            q = simplex_project(p - step * grad)
            f_new = value(q)
        else:
            t = step
            while True:
                q = simplex_project(p - t * grad)
                dq = q - p
                f_new = value(q)
                model = f + float(grad @ dq) + float(dq @ dq) / (2.0 * t)
                if f_new <= model + 1e-15 or t < 1e-18:
                    break
                t *= 0.5
        if record is not None:
            record.append(f_new)
        max_increase = max(max_increase, f_new - f)
        stalled = (f - f_new) <= cfg.convergence_tol
        p, f = q, f_new
        if stalled or it % 512 == 0:
            # Finish the crawl along the identified face exactly, but only
            # accept the point when it certifies as the global optimum
            # without breaking monotone descent.
            for threshold in (1e-8, 1e-12):
                polished = _face_optimum(H, c, p, threshold)
                if polished is None:
                    continue
                f_pol = value(polished)
                if certified(polished, f_pol, f):
                    if record is not None:
                        record.append(f_pol)
                    return polished, f_pol, it, True, max_increase
        if stalled and gap <= 1e-11:
            # Step-size test alone is not trusted: the remaining gap must
            # bound the distance error below the validation tolerances.
            return p, f, it, True, max_increase
    return p, f, cfg.max_iterations, False, max_increase


def _numeric_result(p: np.ndarray, r_o: np.ndarray, arr: np.ndarray) -> ApproximationResult:
    d = r_o - arr.T @ p
    dist = float(np.sqrt(max(float(d @ d), 0.0)))
    support = tuple(int(i) for i in np.flatnonzero(p > SUPPORT_TOL))
    diag = _kkt(p, r_o, arr)
    return ApproximationResult(p, dist, support, Branch.NUMERIC, None, diag)


def oracle_solve(r_o, s, cfg: OracleConfig | None = None) -> ApproximationResult:
    """Minimize the mixture distance by projected gradient descent.

    Convexity of the quadratic makes the converged point a global optimum up
    to tolerance.  Raises OracleError when neither the successive-change
    criterion nor the optimality-gap certificate is met within the iteration
    budget.
    """
    r_o = as_bloch(r_o)
    arr = state_array(s)
    cfg = cfg or OracleConfig()
    H, c, const = _quadratic(r_o, arr)
    p, _, iterations, converged, _ = _pgd(H, c, const, cfg)
    if not converged:
        raise OracleError(
            f"projected gradient did not converge within {cfg.max_iterations} iterations"
        )
    return _numeric_result(p, r_o, arr)


def descent_objectives(r_o, s, cfg: OracleConfig | None = None) -> np.ndarray:
    """Objective value at the start and after every descent iteration."""
    r_o = as_bloch(r_o)
    arr = state_array(s)
    cfg = cfg or OracleConfig()
    H, c, const = _quadratic(r_o, arr)
    record = []
    _pgd(H, c, const, cfg, record=record)
    return np.array(record)


def grid_solve(r_o, s, cfg: OracleConfig | None = None) -> ApproximationResult:
    """Exhaustive minimization over a uniform simplex grid (N <= 3 only).

    The simplex dimension is at most 2 there, so grid_resolution
    subdivisions per coordinate stay tractable; larger sets must use
    oracle_solve.  Grid ties resolve to the lexicographically first point.
    """
    r_o = as_bloch(r_o)
    arr = state_array(s)
    n = arr.shape[0]
    cfg = cfg or OracleConfig()
    if n > 3:
        raise ContractError("exhaustive grid mode supports at most 3 states")
    if n == 1:
        return _numeric_result(np.array([1.0]), r_o, arr)
    G = cfg.grid_resolution
    t = np.linspace(0.0, 1.0, G + 1)
    if n == 2:
        diff = (r_o - arr[1])[None, :] - np.outer(t, arr[0] - arr[1])
        f = np.einsum("ij,ij->i", diff, diff)
        i = int(np.argmin(f))
        return _numeric_result(np.array([t[i], 1.0 - t[i]]), r_o, arr)
    e1 = arr[0] - arr[2]
    e2 = arr[1] - arr[2]
    base = r_o - arr[2]
    best_f = np.inf
    best_p = None
    for i in range(G + 1):
        t2 = t[: G - i + 1]
        diff = (base - t[i] * e1)[None, :] - np.outer(t2, e2)
        f = np.einsum("ij,ij->i", diff, diff)
        j = int(np.argmin(f))
        if f[j] < best_f:
            best_f = float(f[j])
            best_p = np.array([t[i], t2[j], 1.0 - t[i] - t2[j]])
    return _numeric_result(best_p, r_o, arr)
