import numpy as np
import pytest

from blochmix.bloch import ContractError, mix, mixture_distance_sq, trace_distance
from blochmix.solver import (
    Branch,
    decomposition_matrix,
    kkt_residual,
    matrix_rank,
    solve,
    solve_orthonormal_pair,
    solve_pair,
    solve_quad_full_rank,
    solve_triple,
)

from helpers import random_ball, random_states, random_weights

PAULI6 = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]


def check_result(res, r_o, states, kkt_tol=1e-8):
    """Structural invariants every solver result must satisfy."""
    w = res.weights
    assert np.all(w >= 0.0)
    assert w.sum() == pytest.approx(1.0, abs=1e-12)
    assert res.distance**2 == pytest.approx(
        mixture_distance_sq(r_o, states, w), abs=1e-10
    )
    assert all(w[i] > 0 for i in res.support)
    off = [i for i in range(len(w)) if i not in res.support]
    assert all(w[i] == 0.0 for i in off)
    assert len(res.support) <= 4
    d = res.diagnostics
    assert d.stationarity_residual <= kkt_tol
    assert d.complementarity_residual <= kkt_tol
    assert np.all(d.lam_i >= -1e-10)


class TestSolvePair:
    def test_target_on_segment(self):
        res = solve_pair((0, 0, 0.2), (0, 0, 1), (0, 0, -1))
        assert res.branch is Branch.INTERIOR
        assert np.allclose(res.weights, [0.6, 0.4], atol=1e-12)
        assert res.distance == pytest.approx(0.0, abs=1e-12)

    def test_clamp_low(self):
        res = solve_pair((-0.3, 0, 0), (1, 0, 0), (0, 0, 0))
        assert res.branch is Branch.CLAMP_LOW
        assert np.allclose(res.weights, [0, 1])
        # clamp geometry: distance is exactly the distance to the kept state
        assert res.distance == trace_distance((-0.3, 0, 0), (0, 0, 0))
        assert res.distance == pytest.approx(0.3, abs=1e-12)

    def test_clamp_high(self):
        res = solve_pair((0.8, 0.2, 0), (0.5, 0, 0), (0, 0, 0))
        assert res.branch is Branch.CLAMP_HIGH
        assert np.allclose(res.weights, [1, 0])
        assert res.distance == trace_distance((0.8, 0.2, 0), (0.5, 0, 0))

    def test_interior_formula(self):
        res = solve_pair((0.5, 0.5, 0), (1, 0, 0), (0, 0, 0))
        assert res.branch is Branch.INTERIOR
        assert np.allclose(res.weights, [0.5, 0.5], atol=1e-12)
        assert res.distance == pytest.approx(0.5, abs=1e-12)

    def test_coincident_states_degrade(self):
        res = solve_pair((0, 0.4, 0), (0.1, 0, 0), (0.1, 0, 0))
        assert res.branch is Branch.CLAMP_HIGH
        assert np.allclose(res.weights, [1, 0])
        assert res.distance == pytest.approx(trace_distance((0, 0.4, 0), (0.1, 0, 0)))

    def test_beats_random_feasible_points(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            r1, r2, r_o = random_ball(rng), random_ball(rng), random_ball(rng)
            res = solve_pair(r_o, r1, r2)
            t = rng.uniform(0, 1, 500)
            mixtures = np.outer(t, r1) + np.outer(1 - t, r2)
            dists = np.linalg.norm(mixtures - r_o, axis=1)
            assert res.distance <= dists.min() + 1e-9


class TestOrthonormalPair:
    def test_coherence_distance(self):
        res = solve_orthonormal_pair((0.6, 0, 0.2), (0, 0, 1), (0, 0, -1))
        assert res.distance**2 == pytest.approx(0.36, abs=1e-12)
        assert np.allclose(res.weights, [0.6, 0.4], atol=1e-12)

    def test_target_equals_state(self):
        res = solve_orthonormal_pair((0, 0, 1), (0, 0, 1), (0, 0, -1))
        assert res.distance == pytest.approx(0.0, abs=1e-12)
        assert np.allclose(res.weights, [1, 0], atol=1e-12)

    def test_params_target(self):
        from blochmix.bloch import TargetParams, bloch_from_params

        r_o = bloch_from_params(TargetParams(0.25, 1.0, 0.0))
        res = solve_orthonormal_pair(r_o, (0, 0, 1), (0, 0, -1))
        assert res.distance**2 == pytest.approx(0.75, abs=1e-12)

    def test_requires_antipodal_pure(self):
        with pytest.raises(ContractError):
            solve_orthonormal_pair((0, 0, 0), (0, 0, 1), (0, 0, -0.5))

    def test_matches_solve_pair(self):
        rng = np.random.default_rng(8)
        for _ in range(100):
            v = rng.normal(size=3)
            v /= np.linalg.norm(v)
            r_o = random_ball(rng)
            a = solve_orthonormal_pair(r_o, v, -v)
            b = solve_pair(r_o, v, -v)
            assert a.distance == pytest.approx(b.distance, abs=1e-12)
            assert np.allclose(a.weights, b.weights, atol=1e-12)


class TestSolveTriple:
    def test_symmetric_interior(self):
        res = solve_triple((1 / 3, 1 / 3, 1 / 3), (1, 0, 0), (0, 1, 0), (0, 0, 1))
        assert res.branch is Branch.TRIPLE_INTERIOR
        assert np.allclose(res.weights, [1 / 3] * 3, atol=1e-12)
        assert res.distance == pytest.approx(0.0, abs=1e-12)

    def test_origin_projects_to_plane(self):
        res = solve_triple((0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1))
        assert np.allclose(res.weights, [1 / 3] * 3, atol=1e-12)
        assert res.distance == pytest.approx(1 / np.sqrt(3), abs=1e-12)

    def test_collinear_fallback(self):
        res = solve_triple((0, 0, 0.4), (0, 0, 1), (0, 0, 0), (0, 0, -1))
        assert res.branch is Branch.PAIR_FALLBACK
        assert res.distance == pytest.approx(0.0, abs=1e-12)
        # lexicographically smallest optimal pair is (0, 1)
        assert np.allclose(res.weights, [0.4, 0.6, 0.0], atol=1e-12)

    def test_infeasible_pseudo_falls_back(self):
        # Target far beyond the face spanned near state 0.
        res = solve_triple((0.9, 0.05, 0), (1, 0, 0), (-0.5, 0.5, 0), (-0.5, -0.5, 0))
        assert res.branch is Branch.PAIR_FALLBACK
        assert res.pseudo_probabilities is not None
        assert res.pseudo_probabilities.min() < 0

    def test_pseudo_matches_closed_forms(self):
        # The stationarity solution must reproduce the explicit rank-2
        # projection formulas (identity index assignment).
        rng = np.random.default_rng(17)
        checked = 0
        while checked < 100:
            r_o, r1, r2, r3 = (random_ball(rng) for _ in range(4))
            a, b, c = r1 - r2, r2 - r3, r_o - r2
            det = (a @ a) * (b @ b) - (a @ b) ** 2
            if abs(det) < 1e-4:
                continue
            p1 = ((a @ c) * (b @ b) - (a @ b) * (c @ b)) / det
            u, v = r1 - r3, r_o - r1
            p2 = ((a @ u) * (v @ u) - (a @ v) * (u @ u)) / det
            expected = np.array([p1, p2, 1.0 - p1 - p2])
            res = solve_triple(r_o, r1, r2, r3)
            assert res.pseudo_probabilities is not None
            scale = max(1.0, float(np.max(np.abs(expected))))
            assert np.max(np.abs(res.pseudo_probabilities - expected)) / scale <= 1e-9
            checked += 1

    def test_duplicate_state_degrades_to_pair(self):
        rng = np.random.default_rng(29)
        for _ in range(50):
            r1, r3, r_o = random_ball(rng), random_ball(rng), random_ball(rng)
            tri = solve_triple(r_o, r1, r1, r3)
            pair = solve_pair(r_o, r1, r3)
            assert tri.distance == pytest.approx(pair.distance, abs=1e-10)


class TestSolveQuad:
    def test_hand_solved_system(self):
        res = solve_quad_full_rank(
            (0.2, 0.2, 0.2), [(0, 0, 1), (0, 0, -1), (1, 0, 0), (0, 1, 0)]
        )
        assert res.branch is Branch.QUAD_EXACT
        assert np.allclose(res.weights, [0.4, 0.2, 0.2, 0.2], atol=1e-12)
        assert res.distance == pytest.approx(0.0, abs=1e-12)

    def test_target_equals_member(self):
        states = [(0, 0, 1), (0, 0, -1), (1, 0, 0), (0, 1, 0)]
        res = solve_quad_full_rank((1, 0, 0), states)
        assert res.distance == pytest.approx(0.0, abs=1e-12)
        assert np.allclose(res.weights, [0, 0, 1, 0], atol=1e-12)

    def test_outside_hull_matches_face_minimum(self):
        rng = np.random.default_rng(31)
        states = random_states(rng, 4, pure_prob=1.0)
        assert matrix_rank(decomposition_matrix(states)) == 4
        r_o = random_ball(rng)
        res = solve_quad_full_rank(r_o, states)
        if res.branch is Branch.TRIPLE_FALLBACK:
            faces = [
                solve_triple(r_o, *states[list(idx)]).distance
                for idx in ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3))
            ]
            assert res.distance == pytest.approx(min(faces), abs=1e-12)

    def test_rank_deficient_rejected(self):
        with pytest.raises(ContractError):
            solve_quad_full_rank((0, 0, 0), [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0)])


class TestMatrixRank:
    def test_six_pauli_states(self):
        assert matrix_rank(decomposition_matrix(PAULI6)) == 4

    def test_xy_square(self):
        assert matrix_rank(decomposition_matrix(PAULI6[:4])) == 3

    def test_identical_states(self):
        assert matrix_rank(decomposition_matrix([(0.1, 0.2, 0.3)] * 6)) == 1


class TestSolve:
    def test_member_target_takes_first_match(self):
        rng = np.random.default_rng(43)
        states = random_states(rng, 5)
        res = solve(states[2], states)
        assert res.distance == pytest.approx(0.0, abs=1e-10)
        assert res.weights[2] == pytest.approx(1.0, abs=1e-9)
        assert np.sum(np.delete(res.weights, 2)) == pytest.approx(0.0, abs=1e-9)

    def test_single_state(self):
        res = solve((0, 0, 0.5), [(0, 0, 1)])
        assert res.distance == pytest.approx(0.5, abs=1e-12)
        assert res.weights[0] == 1.0

    def test_empty_set(self):
        with pytest.raises(ContractError):
            solve((0, 0, 0), np.zeros((0, 3)))

    def test_rank_deficient_quadruple_uses_enumeration(self):
        res = solve((0.2, 0.1, 0.3), PAULI6[:4])
        assert res.branch is Branch.SUBSET_ENUM
        assert res.distance == pytest.approx(0.3, abs=1e-12)

    def test_support_bounded_by_rank(self):
        rng = np.random.default_rng(19)
        for _ in range(50):
            n = int(rng.integers(4, 9))
            states = random_states(rng, n)
            res = solve(random_ball(rng), states)
            rank = matrix_rank(decomposition_matrix(states))
            assert len(res.support) <= rank <= 4

    def test_optimality_against_random_feasible_weights(self):
        rng = np.random.default_rng(101)
        for _ in range(10):
            n = int(rng.integers(2, 9))
            states = random_states(rng, n)
            r_o = random_ball(rng)
            res = solve(r_o, states)
            q = rng.dirichlet(np.ones(n), size=10_000)
            mixtures = q @ states
            dists = np.linalg.norm(mixtures - r_o, axis=1)
            assert res.distance <= dists.min() + 1e-9

    def test_structural_invariants(self):
        rng = np.random.default_rng(57)
        for _ in range(200):
            n = int(rng.integers(1, 9))
            states = random_states(rng, n)
            r_o = random_ball(rng)
            res = solve(r_o, states)
            check_result(res, r_o, states)

    def test_weights_expand_to_full_length(self):
        rng = np.random.default_rng(3)
        states = random_states(rng, 7)
        res = solve(random_ball(rng), states)
        assert res.weights.shape == (7,)


class TestKKTResidual:
    def test_interior_multipliers_vanish(self):
        res = solve_pair((0, 0, 0.2), (0, 0, 1), (0, 0, -1))
        diag = kkt_residual(res, (0, 0, 0.2), [(0, 0, 1), (0, 0, -1)])
        assert np.allclose(diag.lam_i, 0.0, atol=1e-10)
        assert diag.stationarity_residual <= 1e-10
        assert diag.complementarity_residual <= 1e-10

    def test_clamp_low_multiplier_from_gradient(self):
        states = [(1, 0, 0), (0, 0, 0)]
        res = solve_pair((-0.3, 0, 0), *states)
        diag = kkt_residual(res, (-0.3, 0, 0), states)
        assert diag.lam_i[0] == pytest.approx(0.6, abs=1e-12)
        assert diag.lam_i[1] == pytest.approx(0.0, abs=1e-12)
        assert diag.stationarity_residual <= 1e-10

    def test_complementarity_over_random_instances(self):
        rng = np.random.default_rng(71)
        for _ in range(1000):
            n = int(rng.integers(2, 7))
            states = random_states(rng, n)
            r_o = random_ball(rng)
            res = solve(r_o, states)
            diag = kkt_residual(res, r_o, states)
            assert diag.complementarity_residual <= 1e-8
