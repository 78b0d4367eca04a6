"""Closed-form solutions for sets of Pauli-matrix eigenstates.

The six eigenstates are the unit vectors +/- e_x, +/- e_y, +/- e_z; their
convex hull is the octahedron |x| + |y| + |z| <= 1.  Distances to these sets
are invariant under flipping the sign of any target component together with
the matching +/- labels, so every solver below first flips the target into
the nonnegative octant, applies the closed forms there, and maps the weights
back through the same relabeling.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .bloch import ContractError, TargetParams, ValidationError, as_bloch, bloch_from_params
from .solver import (
    FEASIBILITY_TOL,
    TIE_TOL,
    ApproximationResult,
    Branch,
    _finalize,
)

AXES = ("x", "y", "z")
_AX = {"x": 0, "y": 1, "z": 2}


@dataclass(frozen=True)
class PauliStateSpec:
    """One Pauli eigenstate, named by axis and eigenvalue sign."""

    axis: str
    sign: int

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValidationError(f"axis must be one of {AXES}, got {self.axis!r}")
        if self.sign not in (1, -1):
            raise ValidationError(f"sign must be +1 or -1, got {self.sign!r}")

    def bloch(self) -> np.ndarray:
        r = np.zeros(3)
        r[_AX[self.axis]] = float(self.sign)
        return r


@dataclass(frozen=True)
class PauliProblem:
    """A target plus a supported eigenstate configuration (3, 4, or 6 states)."""

    target: object
    specs: tuple

    def __post_init__(self):
        specs = tuple(self.specs)
        object.__setattr__(self, "specs", specs)
        if len(specs) not in (3, 4, 6):
            raise ValidationError(f"supported set sizes are 3, 4, 6; got {len(specs)}")
        if len(set(specs)) != len(specs):
            raise ValidationError("eigenstate specs must be distinct")


SIX_STATE_SPECS = tuple(
    PauliStateSpec(ax, sg) for ax in AXES for sg in (1, -1)
)
_SIX_INDEX = {spec: i for i, spec in enumerate(SIX_STATE_SPECS)}


def pauli_state_set(specs) -> np.ndarray:
    """(N, 3) array of the eigenstates named by ``specs``."""
    return np.array([sp.bloch() for sp in specs])


def _target_bloch(target) -> np.ndarray:
    if isinstance(target, TargetParams):
        return bloch_from_params(target)
    return as_bloch(target)


def _flips(r_o: np.ndarray) -> np.ndarray:
    return np.where(r_o < 0.0, -1.0, 1.0)


def symmetry_reduce(t: TargetParams) -> TargetParams:
    """Canonical parameters with a in [0, 1/2] and phi in [0, pi/2).

    Maps a -> min(a, 1-a) and phi -> phi mod pi/2.  Both moves are
    octahedral symmetries (a z-flip and quarter turns about z), so distances
    to any full Pauli eigenstate set are unchanged.
    """
    if not isinstance(t, TargetParams):
        t = TargetParams(*t)
    return TargetParams(min(t.a, 1.0 - t.a), t.k, t.phi % (0.5 * np.pi))


def solve_case1(target, axis: str, third: PauliStateSpec) -> ApproximationResult:
    """Both eigenstates of one axis plus a single eigenstate of another.

    State order: (axis, +1), (axis, -1), third.  In the flipped frame with
    s3 the third state's effective sign: s3 = +1 and r_a + r_p <= 1 gives the
    in-plane optimum at distance |r_d| (the out-of-plane component);
    s3 = +1 otherwise clamps onto the (axis, +1)-third edge; s3 = -1 makes
    the third state useless and the +/- axis pair alone is optimal.
    """
    if third.axis == axis:
        raise ContractError("third state must live on a different axis")
    r_o = _target_bloch(target)
    arr = pauli_state_set(
        [PauliStateSpec(axis, 1), PauliStateSpec(axis, -1), third]
    )
    flips = _flips(r_o)
    rc = flips * r_o
    ia, ip = _AX[axis], _AX[third.axis]
    idp = 3 - ia - ip
    s3 = third.sign * flips[ip]
    ra, rp, rd = rc[ia], rc[ip], rc[idp]

    p2_tilde = 0.5 * (1.0 - ra - rp * s3)
    p3_tilde = rp * s3
    pseudo_c = np.array([1.0 - p2_tilde - p3_tilde, p2_tilde, p3_tilde])
    if s3 > 0 and ra + rp <= 1.0:
        w_plus, w_minus, w3 = pseudo_c[0], p2_tilde, p3_tilde
        dist = rd
        branch = Branch.TRIPLE_INTERIOR
    elif s3 > 0:
        w_plus = 0.5 * (1.0 + ra - rp)
        w_minus = 0.0
        w3 = 1.0 - w_plus
        dist = np.sqrt(rd * rd + 0.5 * (ra + rp - 1.0) ** 2)
        branch = Branch.PAIR_FALLBACK
    else:
        w_plus = 0.5 * (1.0 + ra)
        w_minus = 1.0 - w_plus
        w3 = 0.0
        dist = np.sqrt(rp * rp + rd * rd)
        branch = Branch.PAIR_FALLBACK

    swap = flips[ia] < 0.0
    w = np.array([w_minus if swap else w_plus, w_plus if swap else w_minus, w3])
    pseudo = pseudo_c[[1, 0, 2]] if swap else pseudo_c
    return _finalize(w, dist, branch, r_o, arr, pseudo)


def solve_case2(target, specs) -> ApproximationResult:
    """One eigenstate per axis.

    Pseudo-weights come from the stationarity system; when feasible the
    optimum is the projection onto the plane through the three states, at
    distance |1 - s.r| / sqrt(3).  Otherwise the sign pattern decides which
    pair (or single state) carries the optimum.
    """
    specs = tuple(specs)
    if len(specs) != 3 or {sp.axis for sp in specs} != set(AXES):
        raise ContractError("need exactly one eigenstate per axis")
    r_o = _target_bloch(target)
    arr = pauli_state_set(specs)
    flips = _flips(r_o)
    rc = flips * r_o
    s = np.empty(3)
    for sp in specs:
        i = _AX[sp.axis]
        s[i] = sp.sign * flips[i]

    pt = np.empty(3)
    pt[0] = (1.0 + 2.0 * rc[0] * s[0] - rc[1] * s[1] - rc[2] * s[2]) / 3.0
    pt[1] = (1.0 + 2.0 * rc[1] * s[1] - rc[0] * s[0] - rc[2] * s[2]) / 3.0
    pt[2] = 1.0 - pt[0] - pt[1]

    w_axis = np.zeros(3)
    if np.all(pt >= -FEASIBILITY_TOL):
        w_axis = np.clip(pt, 0.0, 1.0)
        w_axis /= w_axis.sum()
        dist = abs(1.0 - float(s @ rc)) / np.sqrt(3.0)
        branch = Branch.TRIPLE_INTERIOR
    else:
        branch = Branch.PAIR_FALLBACK
        plus = [i for i in range(3) if s[i] > 0]
        if len(plus) in (0, 3):
            # Uniform signs: drop the axis whose pseudo-weight went negative.
            al = int(np.argmin(pt))
            ap, ad = (i for i in range(3) if i != al)
            sgn = s[0]
            dist = np.sqrt(rc[al] ** 2 + 0.5 * (rc[ap] + rc[ad] - sgn) ** 2)
            w_axis[ap] = 0.5 * (1.0 + sgn * (rc[ap] - rc[ad]))
            w_axis[ad] = 1.0 - w_axis[ap]
        elif len(plus) == 1:
            al = plus[0]
            minus = [i for i in range(3) if i != al]
            ap = min(minus, key=lambda i: pt[i])  # the negative pseudo-weight
            ad = minus[0] if minus[1] == ap else minus[1]
            if rc[al] + rc[ad] <= 1.0:
                dist = np.sqrt(rc[ap] ** 2 + 0.5 * (rc[al] - rc[ad] - 1.0) ** 2)
                w_axis[al] = 0.5 * (1.0 + rc[al] + rc[ad])
                w_axis[ad] = 1.0 - w_axis[al]
            else:
                dist = np.sqrt(1.0 + float(rc @ rc) - 2.0 * rc[al])
                w_axis[al] = 1.0
        else:
            ad = next(i for i in range(3) if s[i] < 0)
            al, ap = (i for i in range(3) if i != ad)
            dist = np.sqrt(rc[ad] ** 2 + 0.5 * (rc[al] + rc[ap] - 1.0) ** 2)
            w_axis[al] = 0.5 * (1.0 + rc[al] - rc[ap])
            w_axis[ap] = 1.0 - w_axis[al]

    w = np.array([w_axis[_AX[sp.axis]] for sp in specs])
    pseudo = np.array([pt[_AX[sp.axis]] for sp in specs])
    return _finalize(w, dist, branch, r_o, arr, pseudo)


def solve_case3(target, axis: str, axis2: str) -> ApproximationResult:
    """Both eigenstates of two axes (a rank-3 square of four states).

    State order: (axis, +1), (axis, -1), (axis2, +1), (axis2, -1).  With
    L = r_a + r_p in the flipped frame, L <= 1 leaves the optimum in the
    square's plane at distance |r_d|; the returned weights are one of two
    equally optimal assignments, flagged via degenerate_optimum.  L > 1
    clamps onto the edge joining the two positive eigenstates.
    """
    if axis2 == axis:
        raise ContractError("the two axes must differ")
    r_o = _target_bloch(target)
    specs = [
        PauliStateSpec(axis, 1),
        PauliStateSpec(axis, -1),
        PauliStateSpec(axis2, 1),
        PauliStateSpec(axis2, -1),
    ]
    arr = pauli_state_set(specs)
    flips = _flips(r_o)
    rc = flips * r_o
    ia, ip = _AX[axis], _AX[axis2]
    idp = 3 - ia - ip
    ra, rp, rd = rc[ia], rc[ip], rc[idp]

    degenerate = False
    if ra + rp <= 1.0:
        wa_plus = ra
        wa_minus = 0.0
        wp_minus = 0.5 * (1.0 - ra - rp)
        wp_plus = 1.0 - wa_plus - wp_minus
        dist = rd
        branch = Branch.TRIPLE_INTERIOR
        degenerate = True
    else:
        wa_plus = 0.5 * (1.0 + ra - rp)
        wp_plus = 1.0 - wa_plus
        wa_minus = wp_minus = 0.0
        dist = np.sqrt(rd * rd + 0.5 * (ra + rp - 1.0) ** 2)
        branch = Branch.PAIR_FALLBACK

    w = np.empty(4)
    swap_a = flips[ia] < 0.0
    swap_p = flips[ip] < 0.0
    w[0], w[1] = (wa_minus, wa_plus) if swap_a else (wa_plus, wa_minus)
    w[2], w[3] = (wp_minus, wp_plus) if swap_p else (wp_plus, wp_minus)
    return _finalize(w, dist, branch, r_o, arr, None, degenerate)


def solve_case4(target, axis: str, third: PauliStateSpec,
                fourth: PauliStateSpec) -> ApproximationResult:
    """Both eigenstates of one axis plus singles on the other two (rank 4).

    State order: (axis, +1), (axis, -1), third, fourth.  Feasible
    pseudo-weights (effective signs +1 and component sum <= 1 in the flipped
    frame) give an exact construction; otherwise the best of the four
    3-subsets wins, solved by the case-1/case-2 routines.
    """
    if {axis, third.axis, fourth.axis} != set(AXES):
        raise ContractError("the three axes must be distinct")
    r_o = _target_bloch(target)
    specs = [PauliStateSpec(axis, 1), PauliStateSpec(axis, -1), third, fourth]
    arr = pauli_state_set(specs)
    flips = _flips(r_o)
    rc = flips * r_o
    ia, i3, i4 = _AX[axis], _AX[third.axis], _AX[fourth.axis]
    s3 = third.sign * flips[i3]
    s4 = fourth.sign * flips[i4]

    pt = np.empty(4)
    pt[0] = 0.5 * (1.0 + rc[ia] - rc[i3] * s3 - rc[i4] * s4)
    pt[1] = 0.5 * (1.0 - rc[ia] - rc[i3] * s3 - rc[i4] * s4)
    pt[2] = rc[i3] * s3
    pt[3] = rc[i4] * s4
    swap = flips[ia] < 0.0
    pseudo = pt[[1, 0, 2, 3]] if swap else pt.copy()

    if np.all(pt >= -FEASIBILITY_TOL):
        w = np.clip(pseudo, 0.0, 1.0)
        w /= w.sum()
        d = r_o - arr.T @ w
        return _finalize(w, np.sqrt(max(float(d @ d), 0.0)),
                         Branch.QUAD_EXACT, r_o, arr, pseudo)

    subsets = (
        ((0, 1, 2), lambda: solve_case1(r_o, axis, third)),
        ((0, 1, 3), lambda: solve_case1(r_o, axis, fourth)),
        ((0, 2, 3), lambda: solve_case2(r_o, [specs[0], third, fourth])),
        ((1, 2, 3), lambda: solve_case2(r_o, [specs[1], third, fourth])),
    )
    best = None
    best_w = None
    for idx, run in subsets:
        sub = run()
        if best is None or sub.distance < best.distance - TIE_TOL:
            best = sub
            best_w = np.zeros(4)
            best_w[list(idx)] = sub.weights
    return _finalize(best_w, best.distance, Branch.TRIPLE_FALLBACK, r_o, arr, pseudo)


def six_state_solution(target) -> ApproximationResult:
    """Best mixture of all six Pauli eigenstates.

    The decomposition matrix has rank 4, so the optimum is the minimum over
    the fifteen 4-subsets, each of which is either a two-axis square
    (case 3) or an axis pair plus two singles (case 4).  Distance is zero
    exactly when the target lies inside the octahedron.
    """
    r_o = _target_bloch(target)
    arr = pauli_state_set(SIX_STATE_SPECS)
    best = None
    best_w = None
    for subset in combinations(range(6), 4):
        specs = [SIX_STATE_SPECS[i] for i in subset]
        pair_axes = [ax for ax in AXES
                     if sum(1 for sp in specs if sp.axis == ax) == 2]
        if len(pair_axes) == 2:
            sub = solve_case3(r_o, pair_axes[0], pair_axes[1])
            order = [
                PauliStateSpec(pair_axes[0], 1), PauliStateSpec(pair_axes[0], -1),
                PauliStateSpec(pair_axes[1], 1), PauliStateSpec(pair_axes[1], -1),
            ]
        else:
            ax = pair_axes[0]
            singles = sorted(
                (sp for sp in specs if sp.axis != ax), key=lambda sp: _AX[sp.axis]
            )
            sub = solve_case4(r_o, ax, singles[0], singles[1])
            order = [PauliStateSpec(ax, 1), PauliStateSpec(ax, -1),
                     singles[0], singles[1]]
        if best is None or sub.distance < best.distance - TIE_TOL:
            best = sub
            best_w = np.zeros(6)
            for spec, wv in zip(order, sub.weights):
                best_w[_SIX_INDEX[spec]] = wv
    return _finalize(best_w, best.distance, Branch.SUBSET_ENUM, r_o, arr)
