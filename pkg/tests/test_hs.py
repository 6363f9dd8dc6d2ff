import math

import numpy as np
import pytest

from treeskew.hs import (
    FiniteUnitary,
    HSOperator,
    adjoint_act,
    hs_coefficient,
    inner,
    projection_defect,
    projection_defect_formula,
    random_unit_vector,
    random_unitary,
    rank_one,
    rotation_unitary,
    set_defect_sign_fault,
    trace,
    window_projection_demo,
)


def basis_vector(i, dim):
    v = np.zeros(dim, dtype=np.complex128)
    v[i] = 1.0
    return v


class TestOperatorBasics:
    def test_identity_trace(self):
        assert trace(HSOperator(np.eye(5))) == 5.0

    def test_nonsquare_rejected(self):
        with pytest.raises(ValueError, match="square"):
            HSOperator(np.ones((2, 3)))
        with pytest.raises(ValueError, match="finite"):
            HSOperator(np.array([[np.nan, 0.0], [0.0, 1.0]]))

    def test_inner_is_linear_in_first_argument(self):
        x = np.array([1.0 + 2.0j, -0.5j])
        y = np.array([0.25, 1.0 - 1.0j])
        assert inner(2.0j * x, y) == pytest.approx(2.0j * inner(x, y))
        assert inner(x, y) == pytest.approx(np.conj(inner(y, x)))

    def test_rank_one_matrix_entries(self):
        e0, e1 = basis_vector(0, 3), basis_vector(1, 3)
        op = rank_one(e1, e0)
        expected = np.zeros((3, 3))
        expected[0, 1] = 1.0
        assert np.array_equal(op.matrix, expected)

    def test_rank_one_trace_and_norm(self):
        rng = np.random.default_rng(7)
        x = random_unit_vector(4, rng)
        y = 2.0 * random_unit_vector(4, rng)
        op = rank_one(x, y)
        assert trace(op) == pytest.approx(inner(y, x))
        assert op.hs_norm() == pytest.approx(np.linalg.norm(x) * np.linalg.norm(y))

    def test_rank_one_projection_is_idempotent(self):
        rng = np.random.default_rng(8)
        x = random_unit_vector(5, rng)
        p = rank_one(x, x).matrix
        assert np.allclose(p @ p, p, atol=1e-14)
        assert np.allclose(p, p.conj().T, atol=1e-14)

    def test_rank_one_shape_validation(self):
        with pytest.raises(ValueError):
            rank_one(np.ones(3), np.ones(4))
        with pytest.raises(ValueError):
            rank_one(np.ones((2, 2)), np.ones((2, 2)))


class TestAdjointAction:
    def test_covariance_on_rank_one(self):
        rng = np.random.default_rng(21)
        u = random_unitary(6, rng)
        x = random_unit_vector(6, rng)
        y = random_unit_vector(6, rng)
        moved = adjoint_act(u, rank_one(x, y)).matrix
        direct = rank_one(u.matrix @ x, u.matrix @ y).matrix
        assert np.allclose(moved, direct, atol=1e-12)

    def test_preserves_hs_norm_and_trace(self):
        rng = np.random.default_rng(22)
        u = random_unitary(5, rng)
        t = HSOperator(rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5)))
        moved = adjoint_act(u, t)
        assert moved.hs_norm_sq() == pytest.approx(t.hs_norm_sq(), rel=1e-12)
        assert trace(moved) == pytest.approx(trace(t), rel=1e-12)

    def test_dimension_mismatch(self):
        rng = np.random.default_rng(23)
        with pytest.raises(ValueError, match="dimension"):
            adjoint_act(random_unitary(3, rng), HSOperator(np.eye(4)))


class TestProjectionDefect:
    def test_quarter_turn_in_the_plane(self):
        u = rotation_unitary(math.pi / 4)
        xi = np.array([1.0, 0.0])
        assert abs(projection_defect(u, xi) - 1.0) <= 1e-12
        assert abs(projection_defect_formula(u, xi) - 1.0) <= 1e-12

    @pytest.mark.parametrize("theta", [0.0, 0.3, math.pi / 3, 1.5, math.pi / 2])
    def test_rotation_closed_form(self, theta):
        # rotating e0 by theta gives overlap cos(theta), so the defect
        # is 2 sin^2(theta)
        u = rotation_unitary(theta)
        xi = np.array([1.0, 0.0])
        expected = 2.0 * math.sin(theta) ** 2
        assert projection_defect(u, xi) == pytest.approx(expected, abs=1e-12)

    def test_two_routes_agree_on_random_complex_data(self):
        rng = np.random.default_rng(404)
        for trial in range(500):
            dim = 2 + trial % 15
            u = random_unitary(dim, rng)
            xi = random_unit_vector(dim, rng)
            a = projection_defect(u, xi)
            b = projection_defect_formula(u, xi)
            assert abs(a - b) <= 1e-10

    def test_range_is_zero_to_two(self):
        rng = np.random.default_rng(31)
        for _ in range(50):
            u = random_unitary(4, rng)
            xi = random_unit_vector(4, rng)
            assert -1e-12 <= projection_defect(u, xi) <= 2.0 + 1e-12
        assert projection_defect(FiniteUnitary(np.eye(4)), basis_vector(0, 4)) == 0.0

    def test_rejects_non_unit_vector(self):
        with pytest.raises(ValueError, match="unit vector"):
            projection_defect(rotation_unitary(0.1), np.array([1.0, 1.0]))

    def test_fault_hook_breaks_the_identity_and_reverts(self):
        u = rotation_unitary(0.2)
        xi = np.array([1.0, 0.0])
        clean = projection_defect(u, xi)
        set_defect_sign_fault(True)
        try:
            faulty = projection_defect(u, xi)
        finally:
            set_defect_sign_fault(False)
        assert abs(faulty - projection_defect_formula(u, xi)) > 0.5
        assert projection_defect(u, xi) == clean


class TestHSCoefficient:
    def test_identity_unitary_on_matrix_units(self):
        e01 = rank_one(basis_vector(1, 3), basis_vector(0, 3))
        u = FiniteUnitary(np.eye(3))
        assert hs_coefficient(e01, e01, u) == pytest.approx(1.0)

    def test_rank_one_factorization(self):
        rng = np.random.default_rng(55)
        for _ in range(100):
            dim = int(rng.integers(2, 9))
            u = random_unitary(dim, rng)
            x1, y1 = random_unit_vector(dim, rng), random_unit_vector(dim, rng)
            x2, y2 = random_unit_vector(dim, rng), random_unit_vector(dim, rng)
            got = hs_coefficient(rank_one(x1, y1), rank_one(x2, y2), u)
            direct = inner(u.matrix @ y2, y1) * np.conj(inner(u.matrix @ x2, x1))
            assert abs(got - direct) <= 1e-10

    def test_rank_one_modulus_bound(self):
        rng = np.random.default_rng(56)
        for _ in range(500):
            dim = int(rng.integers(2, 10))
            u = random_unitary(dim, rng)
            x1 = 1.7 * random_unit_vector(dim, rng)
            x2 = 0.4 * random_unit_vector(dim, rng)
            y1, y2 = random_unit_vector(dim, rng), random_unit_vector(dim, rng)
            value = abs(hs_coefficient(rank_one(x1, y1), rank_one(x2, y2), u))
            bound = abs(inner(u.matrix @ y2, y1)) * np.linalg.norm(x1) * np.linalg.norm(x2)
            assert value <= bound + 1e-10

    def test_phase_diagonal_matches_characteristic_sum(self):
        # U_L = diag(exp(i j theta L)) conjugating the projection onto a
        # weight vector gives |sum_j p_j exp(i j theta L)|^2, which we can
        # evaluate directly; the coefficient decays until the phases wrap
        dim, theta = 32, 0.35
        j = np.arange(dim)
        weights = np.exp(-((j - 16.0) ** 2) / 18.0)
        xi = np.sqrt(weights / weights.sum()).astype(np.complex128)
        p = rank_one(xi, xi)
        probs = np.abs(xi) ** 2
        values = []
        for length in range(9):
            u = FiniteUnitary(np.diag(np.exp(1j * j * theta * length)))
            got = hs_coefficient(p, p, u)
            char = np.sum(probs * np.exp(1j * j * theta * length))
            assert abs(got - abs(char) ** 2) <= 1e-10
            values.append(abs(got))
        assert all(b < a for a, b in zip(values, values[1:]))
        assert values[-1] < 1e-3

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            hs_coefficient(
                HSOperator(np.eye(2)), HSOperator(np.eye(3)), rotation_unitary(0.1)
            )


class TestHelpers:
    def test_random_unitary_is_unitary_and_deterministic(self):
        a = random_unitary(7, np.random.default_rng(99)).matrix
        b = random_unitary(7, np.random.default_rng(99)).matrix
        assert np.array_equal(a, b)
        assert np.max(np.abs(a.conj().T @ a - np.eye(7))) <= 1e-12

    def test_non_unitary_rejected(self):
        with pytest.raises(ValueError, match="unitary"):
            FiniteUnitary(2.0 * np.eye(3))

    def test_window_projection_demo(self):
        op = window_projection_demo(2, 64, 8.0)
        assert trace(op) == pytest.approx(1.0)
        assert np.allclose(op.matrix @ op.matrix, op.matrix, atol=1e-12)

    def test_window_projection_validation(self):
        with pytest.raises(ValueError, match="dimension"):
            window_projection_demo(2, 1, 8.0)
        with pytest.raises(ValueError, match="grid"):
            window_projection_demo(1, 4, 100.0)
