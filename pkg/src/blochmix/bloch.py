"""Qubit states on the Bloch ball: validation, trace distance, mixture geometry.

A qubit density matrix rho = (I + r.sigma)/2 is identified with its Bloch
vector r, a real 3-vector with ||r|| <= 1 (pure states sit on the unit
sphere).  For qubits the trace distance ||rho - sigma||_1 equals the
Euclidean distance between the Bloch vectors, so the whole approximation
problem lives in R^3 and density matrices never appear in any interface.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Squared norms in (1, 1 + STATE_TOL] are treated as rounding overshoot of a
# pure state and pulled back onto the sphere; anything larger is rejected.
STATE_TOL = 1e-9

# Mixture weight vectors must sum to one within this tolerance.
WEIGHT_SUM_TOL = 1e-12


class ValidationError(ValueError):
    """An input does not describe a valid qubit state or parameter set."""


class ContractError(ValueError):
    """A caller violated an operation's calling contract."""


def as_bloch(v) -> np.ndarray:
    """Validate ``v`` as a Bloch vector, returning a float array of shape (3,)."""
    r = np.asarray(v, dtype=float)
    if r.shape != (3,):
        raise ValidationError(f"expected 3 Bloch components, got shape {r.shape}")
    if not np.all(np.isfinite(r)):
        raise ValidationError(f"Bloch vector has non-finite components: {r!r}")
    n2 = float(r @ r)
    if n2 > 1.0 + STATE_TOL:
        raise ValidationError(
            f"Bloch norm {np.sqrt(n2):.6f} exceeds 1: not a qubit state"
        )
    if n2 > 1.0:
        r = r / np.sqrt(n2)
    return r


def is_pure(r) -> bool:
    """True when the state sits on the unit sphere (within STATE_TOL)."""
    r = as_bloch(r)
    return abs(float(r @ r) - 1.0) <= STATE_TOL


@dataclass(frozen=True)
class TargetParams:
    """(a, k, phi) parameterization of a target state.

    The derived Bloch vector is
        r_x = 2k sqrt(a(1-a)) cos(phi),
        r_y = 2k sqrt(a(1-a)) sin(phi),
        r_z = 1 - 2a,
    with a, k in [0, 1] and phi in radians (the phase sits on the upper-right
    matrix entry as exp(-i phi), which fixes the sign of r_y).
    """

    a: float
    k: float
    phi: float

    def __post_init__(self):
        if not (np.isfinite(self.a) and 0.0 <= self.a <= 1.0):
            raise ValidationError(f"a must lie in [0, 1], got {self.a!r}")
        if not (np.isfinite(self.k) and 0.0 <= self.k <= 1.0):
            raise ValidationError(f"k must lie in [0, 1], got {self.k!r}")
        if not np.isfinite(self.phi):
            raise ValidationError(f"phi must be finite, got {self.phi!r}")


def bloch_from_params(t: TargetParams) -> np.ndarray:
    """Bloch vector of the (a, k, phi) target; always a valid state."""
    if not isinstance(t, TargetParams):
        t = TargetParams(*t)
    m = 2.0 * t.k * np.sqrt(t.a * (1.0 - t.a))
    return np.array([m * np.cos(t.phi), m * np.sin(t.phi), 1.0 - 2.0 * t.a])


def params_from_bloch(r) -> TargetParams:
    """Recover (a, k, phi) from a Bloch vector.

    Inverse of :func:`bloch_from_params` up to the phase ambiguity at k = 0
    and the k ambiguity at a in {0, 1}.
    """
    r = as_bloch(r)
    a = 0.5 * (1.0 - r[2])
    m = float(np.hypot(r[0], r[1]))
    denom = 2.0 * np.sqrt(a * (1.0 - a))
    k = min(m / denom, 1.0) if denom > 0.0 else 0.0
    phi = float(np.arctan2(r[1], r[0])) % (2.0 * np.pi)
    return TargetParams(a, k, phi)


class StateSet:
    """Ordered collection of qubit states; weight vectors align with this order.

    Duplicate states are allowed; downstream degeneracy handling keeps index
    alignment with the caller's input.
    """

    def __init__(self, states, labels=None):
        rows = [as_bloch(s) for s in states]
        if not rows:
            raise ValidationError("a state set must contain at least one state")
        self.states = np.array(rows)
        if labels is not None:
            labels = tuple(str(lbl) for lbl in labels)
            if len(labels) != len(rows):
                raise ValidationError(
                    f"{len(labels)} labels for {len(rows)} states"
                )
        self.labels = labels

    def __len__(self) -> int:
        return self.states.shape[0]

    def __getitem__(self, i) -> np.ndarray:
        return self.states[i]

    def __iter__(self):
        return iter(self.states)

    @property
    def bloch_matrix(self) -> np.ndarray:
        """3 x N matrix whose columns are the Bloch vectors."""
        return self.states.T

    def __repr__(self) -> str:
        return f"StateSet({len(self)} states)"


def state_array(s) -> np.ndarray:
    """Coerce a StateSet or array-like of Bloch vectors to an (N, 3) array."""
    if isinstance(s, StateSet):
        return s.states
    arr = np.asarray(s, dtype=float)
    if arr.ndim == 1 and arr.shape == (3,):
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValidationError(f"expected an (N, 3) array of Bloch vectors, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("state array has non-finite entries")
    n2 = np.einsum("ij,ij->i", arr, arr)
    bad = np.flatnonzero(n2 > 1.0 + STATE_TOL)
    if bad.size:
        raise ValidationError(
            f"state {bad[0]} has Bloch norm {np.sqrt(n2[bad[0]]):.6f} > 1"
        )
    over = n2 > 1.0
    if np.any(over):
        arr = arr.copy()
        arr[over] /= np.sqrt(n2[over])[:, None]
    return arr


def check_weights(p, n: int) -> np.ndarray:
    """Validate a mixture weight vector of length ``n`` (sum 1, nonnegative)."""
    p = np.asarray(p, dtype=float)
    if p.shape != (n,):
        raise ContractError(f"weight vector has shape {p.shape}, expected ({n},)")
    if not np.all(np.isfinite(p)):
        raise ContractError("weight vector has non-finite entries")
    if np.min(p) < -WEIGHT_SUM_TOL:
        raise ContractError(f"negative mixture weight {np.min(p)!r}")
    total = float(p.sum())
    if abs(total - 1.0) > WEIGHT_SUM_TOL:
        raise ContractError(f"mixture weights sum to {total!r}, expected 1")
    return p


def mix(s, p) -> np.ndarray:
    """Bloch vector of the convex mixture sum_i p_i r_i."""
    arr = state_array(s)
    p = check_weights(p, arr.shape[0])
    return arr.T @ p


def trace_distance(r1, r2) -> float:
    """Trace distance between two qubit states = Euclidean Bloch distance."""
    d = as_bloch(r1) - as_bloch(r2)
    return float(np.sqrt(d @ d))


def mixture_distance_sq(r_o, s, p) -> float:
    """Squared trace distance between the target and the mixture with weights p."""
    r_o = as_bloch(r_o)
    d = r_o - mix(s, p)
    return float(d @ d)


def hessian(s) -> np.ndarray:
    """Curvature matrix 2 R^T R of the squared-distance objective in the weights.

    R is the 3 x N matrix of Bloch vectors; the result is symmetric positive
    semidefinite, which is what makes the weight optimization convex.
    """
    arr = state_array(s)
    return 2.0 * (arr @ arr.T)
