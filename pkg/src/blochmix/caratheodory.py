"""Support reduction for convex decompositions of a qubit state.

Any mixture over N states can be rewritten, over the same states, using at
most rank(A) of them, where A is the 4 x N decomposition matrix.  Each step
finds a kernel vector k of the support-restricted columns (which forces
sum(k) = 0 through the all-ones row), walks the weights along it until the
first one hits zero, and repeats; the represented state never moves.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bloch import ContractError, StateSet, ValidationError, as_bloch, state_array
from .solver import RANK_TOL, decomposition_matrix, matrix_rank

# Weights at or below this are treated as already zero before kernel steps,
# so near-zero entries never blow up the step-length ratios.
ZERO_WEIGHT = 1e-14

# Cached mixtures must reproduce sum(p_i r_i) this closely.
CACHE_TOL = 1e-12


@dataclass
class Decomposition:
    """A state set with mixture weights and the cached mixed Bloch vector."""

    states: StateSet
    weights: np.ndarray
    mixed_bloch: np.ndarray

    def __post_init__(self):
        if not isinstance(self.states, StateSet):
            self.states = StateSet(state_array(self.states))
        self.weights = _check_decomposition_weights(self.weights, len(self.states))
        self.mixed_bloch = as_bloch(self.mixed_bloch)
        actual = self.states.states.T @ self.weights
        if np.linalg.norm(actual - self.mixed_bloch) > CACHE_TOL:
            raise ContractError(
                "cached mixed_bloch does not match the weighted mixture"
            )

    @classmethod
    def from_weights(cls, states, weights) -> "Decomposition":
        states = states if isinstance(states, StateSet) else StateSet(state_array(states))
        weights = _check_decomposition_weights(weights, len(states))
        return cls(states, weights, states.states.T @ weights)

    @property
    def support(self) -> tuple:
        return tuple(int(i) for i in np.flatnonzero(self.weights > ZERO_WEIGHT))


def _check_decomposition_weights(p, n: int) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape != (n,):
        raise ValidationError(f"weight vector has shape {p.shape}, expected ({n},)")
    if not np.all(np.isfinite(p)):
        raise ValidationError("weights must be finite")
    if np.min(p) < -1e-12:
        raise ValidationError(f"negative mixture weight {float(np.min(p))!r}")
    if abs(float(p.sum()) - 1.0) > 1e-12:
        raise ValidationError(f"weights sum to {float(p.sum())!r}, expected 1")
    return np.clip(p, 0.0, None)


def _kernel_vector(cols: np.ndarray) -> np.ndarray:
    """A null vector of the column family, oriented deterministically.

    Uses the right singular vector of the smallest singular value; among
    several (near-)zero singular values the one with the smallest index
    wins.  The vector is flipped so its last nonzero entry is positive,
    mirroring the normalization in which the appended dependent column
    carries coefficient +1.
    """
    _, sigma, vt = np.linalg.svd(cols)
    zero = np.flatnonzero(sigma <= RANK_TOL * sigma[0])
    row = int(zero[0]) if zero.size else vt.shape[0] - 1
    k = vt[row]
    nonzero = np.flatnonzero(np.abs(k) > 1e-12)
    if nonzero.size and k[nonzero[-1]] < 0.0:
        k = -k
    return k


def _reduction_steps(d: Decomposition):
    """Yield the weight vector after each single-column elimination."""
    A = decomposition_matrix(d.states)
    rank = matrix_rank(A)
    p = d.weights.copy()
    while True:
        support = np.flatnonzero(p > ZERO_WEIGHT)
        if support.size <= rank:
            return
        k = _kernel_vector(A[:, support])
        positive = np.flatnonzero(k > 1e-12)
        ratios = p[support[positive]] / k[positive]
        hit = int(np.argmin(ratios))
        alpha = float(ratios[hit])
        p[support] -= alpha * k
        p[support[positive[hit]]] = 0.0
        tiny = (p > -1e-12) & (p < 0.0)
        p[tiny] = 0.0
        if np.min(p) < 0.0:
            raise ContractError(
                f"reduction produced weight {float(np.min(p))!r} < -1e-12"
            )
        yield p.copy()


def reduce(d: Decomposition) -> Decomposition:
    """Rewrite the decomposition over at most rank(A) of the same states.

    Zero weights are kept as explicit zeros so the index alignment with the
    input set is preserved; the mixed Bloch vector is unchanged up to
    floating-point noise.
    """
    p = d.weights
    for p in _reduction_steps(d):
        pass
    return Decomposition(d.states, p, d.states.states.T @ p)
