"""Shared helpers for the test suite: random instances and the density-matrix
cross-check used to validate the Bloch-space shortcuts."""

import numpy as np

SIGMA = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
IDENTITY = np.eye(2, dtype=complex)


def density_matrix(r):
    """rho = (I + r.sigma)/2 for a Bloch vector r."""
    r = np.asarray(r, dtype=float)
    return 0.5 * (IDENTITY + sum(r[i] * SIGMA[i] for i in range(3)))


def trace_norm(m):
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    return float(np.sum(np.abs(np.linalg.eigvalsh(m))))


def bloch_of_density(rho):
    return np.array([float(np.trace(rho @ SIGMA[i]).real) for i in range(3)])


def random_ball(rng):
    """Uniform sample from the closed unit ball."""
    v = rng.normal(size=3)
    v /= np.linalg.norm(v)
    return v * rng.uniform() ** (1.0 / 3.0)


def random_sphere(rng):
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def random_states(rng, n, pure_prob=0.5):
    """(n, 3) array mixing pure and mixed states."""
    rows = []
    for _ in range(n):
        v = random_sphere(rng)
        if rng.uniform() >= pure_prob:
            v = v * rng.uniform() ** (1.0 / 3.0)
        rows.append(v)
    return np.array(rows)


def random_weights(rng, n):
    return rng.dirichlet(np.ones(n))
