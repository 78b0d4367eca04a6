"""Built-in state-set fixtures.

The ex1..ex6 sets reproduce published example data verbatim (values printed
to four decimal places).  Several of the nominally pure states overshoot the
unit sphere by ~1e-4 because of that rounding; the loader pulls those back
onto the sphere.  One state in ex6 overshoots by far more than rounding can
explain (norm ~1.55); it is rejected unless ``allow_invalid`` is set, in
which case it is renormalized with a warning.
"""

from __future__ import annotations

import hashlib
import warnings

import numpy as np

from .bloch import STATE_TOL, StateSet, ValidationError

# States whose norm exceeds 1 by more than STATE_TOL but at most this band
# are taken to be pure states rounded to four decimals and are renormalized.
PRINT_ROUNDING_BAND = 1e-3

EX1 = (
    (0.7888, 0.1788, -0.1182),
    (0.4715, 0.4288, 0.5066),
)

EX2 = (
    (-0.0347, 0.0178, 0.0088),
    (0.3369, -0.7514, -0.2106),
    (0.3784, 0.8012, -0.4636),
)

EX3 = (
    (-0.3384, 0.2543, 0.4151),
    (0.6385, 0.0199, 0.5333),
    (0.1693, 0.0661, 0.0845),
    (0.5275, -0.2657, 0.5443),
)

# Two orthonormal pairs of pure states, given as state-vector amplitudes
# (orthogonality holds only to the printed four decimals).
EX4_AMPLITUDES = (
    (0.9531 - 0.1605j, -0.2363 + 0.1001j),
    (0.2495 + 0.0605j, 0.9665 + 0.0028j),
    (-0.6140 + 0.1652j, -0.4624 - 0.6179j),
    (-0.3277 + 0.6988j, 0.6347 + 0.0374j),
)

EX5 = (
    (-0.4767, 0.5882, -0.6051),
    (0.3041, -0.2655, 0.1277),
    (0.0459, -0.3519, 0.0202),
    (0.7263, -0.1260, -0.6758),
    (-0.5631, -0.5566, 0.6108),
)

EX6 = (
    (-0.0192, 0.5339, 0.4067),
    (-0.0299, 0.0694, 0.1474),
    (0.1865, -0.2202, -0.0863),
    (0.4860, -0.3405, -0.5005),
    (-0.4864, -0.4754, -0.4707),
    (-0.5738, -0.0250, 0.5583),
    (-0.0071, 0.0058, -0.0298),
    (-0.5357, -0.7338, 0.4177),
    (-0.9142, -0.8936, -0.8847),
    (0.4888, 0.8306, 0.2670),
)

# Indices of the states the source data declares pure, per fixture.
PURE_STATES = {
    "ex2": (2,),
    "ex4": (0, 1, 2, 3),
    "ex5": (3, 4),
    "ex6": (7, 8, 9),
}

_PAULI_XY = ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0))
_PAULI_XYZ6 = ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1))
_PAULI_LABELS = ("x+", "x-", "y+", "y-", "z+", "z-")


def _bloch_from_state_vector(amps) -> np.ndarray:
    """Bloch vector of a (normalized) two-component state vector."""
    a, b = complex(amps[0]), complex(amps[1])
    norm_sq = abs(a) ** 2 + abs(b) ** 2
    return np.array([
        2.0 * (a.conjugate() * b).real,
        2.0 * (a.conjugate() * b).imag,
        abs(a) ** 2 - abs(b) ** 2,
    ]) / norm_sq


def _load(rows, name: str, allow_invalid: bool):
    out = []
    for i, row in enumerate(rows):
        r = np.asarray(row, dtype=float)
        n2 = float(r @ r)
        if n2 > 1.0 + STATE_TOL:
            n = float(np.sqrt(n2))
            if n <= 1.0 + PRINT_ROUNDING_BAND:
                r = r / n
            elif allow_invalid:
                warnings.warn(
                    f"{name} state r{i + 1} has Bloch norm {n:.4f} > 1; "
                    "renormalized onto the unit sphere"
                )
                r = r / n
            else:
                raise ValidationError(
                    f"{name} state r{i + 1} has Bloch norm {n:.4f} > 1 "
                    "(pass allow_invalid to renormalize)"
                )
        out.append(r)
    return out


def fixture_names() -> tuple:
    return ("ex1", "ex2", "ex3", "ex4", "ex5", "ex6", "pauli_xy", "pauli_xyz6")


def fixture(name: str, allow_invalid: bool = False) -> StateSet:
    """Return a named built-in state set.

    ex1..ex6 are the published example sets; pauli_xy is the four x/y
    eigenstates and pauli_xyz6 all six Pauli eigenstates.
    """
    if name == "ex1":
        rows = _load(EX1, name, allow_invalid)
    elif name == "ex2":
        rows = _load(EX2, name, allow_invalid)
    elif name == "ex3":
        rows = _load(EX3, name, allow_invalid)
    elif name == "ex4":
        rows = [_bloch_from_state_vector(a) for a in EX4_AMPLITUDES]
    elif name == "ex5":
        rows = _load(EX5, name, allow_invalid)
    elif name == "ex6":
        rows = _load(EX6, name, allow_invalid)
    elif name == "pauli_xy":
        return StateSet(_PAULI_XY, labels=_PAULI_LABELS[:4])
    elif name == "pauli_xyz6":
        return StateSet(_PAULI_XYZ6, labels=_PAULI_LABELS)
    else:
        raise ValidationError(
            f"unknown fixture {name!r}; choose from {', '.join(fixture_names())}"
        )
    return StateSet(rows, labels=[f"r{i + 1}" for i in range(len(rows))])


def fixture_checksum() -> str:
    """SHA-256 over the raw stored values, guarding against silent edits."""
    h = hashlib.sha256()
    for name, rows in (("ex1", EX1), ("ex2", EX2), ("ex3", EX3),
                       ("ex5", EX5), ("ex6", EX6)):
        for row in rows:
            h.update(f"{name}:{row[0]:.4f},{row[1]:.4f},{row[2]:.4f};".encode())
    for a, b in EX4_AMPLITUDES:
        h.update(
            f"ex4:{a.real:.4f},{a.imag:.4f},{b.real:.4f},{b.imag:.4f};".encode()
        )
    return h.hexdigest()
