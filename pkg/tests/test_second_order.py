"""
Unit Tests for 2x2 matrix powers and second-order recurrences
"""

import math
from datetime import timedelta

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.errors import IncompatibleBoundary
from src.lattice import BoundaryData, LatticeWindow, minimizing_betas, mu
from src.solvers import (
    Eigen2,
    SecondOrderProblem,
    classify_eigen,
    matrix_power_2x2,
    oracle_second_order,
    power_coefficients,
    residual_second_order,
    solve_second_order,
    solve_second_order_grid,
)
from src.solvers.second_order import COMPLEX, DISTINCT_REAL, REPEATED
from tests.helpers import create_random_second_order_problem


def random_matrix(rng: np.random.Generator, case: str) -> np.ndarray:
    """Well-conditioned 2x2 matrix with the requested spectral class."""
    S = rng.uniform(-0.5, 0.5, size=(2, 2)) + 2.0 * np.eye(2)
    if case == DISTINCT_REAL:
        l1 = rng.uniform(-1.2, 1.2)
        l2 = l1 + rng.choice([-1, 1]) * rng.uniform(0.2, 0.8)
        core = np.diag([l1, l2])
    elif case == REPEATED:
        lam = rng.uniform(-1.2, 1.2)
        core = np.array([[lam, 1.0], [0.0, lam]])
    else:
        r = rng.uniform(0.3, 1.1)
        theta = rng.uniform(0.3, math.pi - 0.3)
        core = r * np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
    return S @ core @ np.linalg.inv(S)


def fibonacci_problem() -> SecondOrderProblem:
    """x(t + 2) = x(t + 1) + x(t) with every family identically 1."""
    return SecondOrderProblem(-1.0, -1.0, BoundaryData.constant(1.0, 2, layers=2))


class TestClassification:
    """Test cases for the spectral classification."""

    def test_distinct_real(self):
        """Test a symmetric matrix with eigenvalues 3 and 1."""
        eigen = classify_eigen([[2.0, 1.0], [1.0, 2.0]])
        assert eigen.case == DISTINCT_REAL
        assert (eigen.lambda1, eigen.lambda2) == (3.0, 1.0)

    def test_repeated(self):
        """Test a Jordan block."""
        eigen = classify_eigen([[1.0, 1.0], [0.0, 1.0]])
        assert eigen.case == REPEATED
        assert eigen.lambda1 == 1.0

    def test_complex(self):
        """Test the quarter rotation."""
        eigen = classify_eigen([[0.0, -1.0], [1.0, 0.0]])
        assert eigen.case == COMPLEX
        assert eigen.r == pytest.approx(1.0)
        assert eigen.theta == pytest.approx(math.pi / 2)

    def test_zero_power_is_identity(self):
        """Test that A^0 = I in every class."""
        for A in ([[2.0, 1.0], [1.0, 2.0]], [[1.0, 1.0], [0.0, 1.0]], [[0.0, -1.0], [1.0, 0.0]]):
            assert power_coefficients(classify_eigen(A), 0) == (0.0, 1.0)
            assert np.array_equal(matrix_power_2x2(A, 0), np.eye(2))


class TestMatrixPower:
    """Test cases for the closed-form 2x2 powers."""

    @pytest.mark.parametrize('case', [DISTINCT_REAL, REPEATED, COMPLEX])
    def test_matches_repeated_multiplication(self, case):
        """Test c1 A + c0 I against A @ A @ ... for k up to 30."""
        rng = np.random.default_rng({DISTINCT_REAL: 1, REPEATED: 2, COMPLEX: 3}[case])
        for _ in range(100):
            A = random_matrix(rng, case)
            assert classify_eigen(A).case == case
            reference = np.eye(2)
            for k in range(31):
                result = matrix_power_2x2(A, k)
                scale = max(1.0, float(np.max(np.abs(reference))))
                assert np.max(np.abs(result - reference)) <= 1e-8 * scale
                reference = reference @ A

    @pytest.mark.parametrize('k', [1, 2, 5, 13, 30])
    def test_branches_agree_near_degeneracy(self, k):
        """Test that forcing each branch on a nearly repeated spectrum gives the same coefficients."""
        lam, eps = 0.9, 1e-5
        trace = 2 * lam
        real = Eigen2.distinct_real(trace, lam * lam - eps * eps, lam + eps, lam - eps)
        repeated = Eigen2.repeated(trace, lam * lam, lam)
        pair = Eigen2.complex_pair(trace, lam * lam + eps * eps, math.hypot(lam, eps), math.atan2(eps, lam))

        reference = np.array(power_coefficients(repeated, k))
        for eigen in (real, pair):
            coefficients = np.array(power_coefficients(eigen, k))
            scale = np.maximum(1.0, np.abs(reference))
            assert np.all(np.abs(coefficients - reference) / scale <= 1e-5)


class TestSecondOrderRecurrence:
    """Test cases for the second-order closed form."""

    def test_fibonacci_values(self):
        """Test the diagonal Fibonacci instance at (4, 4) and (4, 2)."""
        p = fibonacci_problem()
        assert solve_second_order(p, (4, 4)) == pytest.approx(5.0, abs=1e-12)
        assert solve_second_order(p, (4, 2)) == pytest.approx(2.0, abs=1e-12)

    def test_fibonacci_oracle_is_exact(self):
        """Test that the sweep produces the Fibonacci numbers by mu(t)."""
        oracle = oracle_second_order(fibonacci_problem(), LatticeWindow((6, 6)))
        fibonacci = [1, 1, 2, 3, 5, 8, 13]
        for t in oracle.window.points():
            assert oracle[t][0] == fibonacci[mu(t)]

    def test_repeated_root_linear_growth(self):
        """Test that x = mu(t) solves the repeated-root recurrence with a = -2, b = 1."""
        bd = BoundaryData.from_full_sequence(lambda t: float(min(t)), 2, 1, layers=2)
        p = SecondOrderProblem(-2.0, 1.0, bd)
        assert p.eigen().case == REPEATED
        grid = solve_second_order_grid(p, LatticeWindow((6, 5)))
        for t in grid.window.points():
            assert grid[t][0] == pytest.approx(mu(t), abs=1e-10)

    def test_complex_roots_period_four(self):
        """Test that x(t + 2) = -x(t) has period 4 along diagonals."""
        bd = BoundaryData.from_full_sequence(lambda t: float(t[0] - t[1]) + 1.0, 2, 1, layers=2)
        p = SecondOrderProblem(0.0, 1.0, bd)
        assert p.eigen().case == COMPLEX
        assert solve_second_order(p, (6, 7), waive_compat=True) == pytest.approx(
            solve_second_order(p, (2, 3), waive_compat=True), abs=1e-12
        )

    def test_corner_mismatch_refused(self):
        """Test that f = 0 with g = 1 is refused."""
        p = SecondOrderProblem(-1.0, -1.0, BoundaryData.constant(0.0, 2, layers=2, second_value=1.0))
        with pytest.raises(IncompatibleBoundary):
            solve_second_order(p, (3, 3))

    @pytest.mark.parametrize('seed', range(5))
    def test_every_minimizing_hyperplane_gives_the_same_value(self, seed):
        """Test that tied hyperplanes agree when both layers are compatible."""
        p = create_random_second_order_problem(seed, arity=3)
        for t in LatticeWindow.cube(4, 3).points():
            values = [solve_second_order(p, t, beta=beta) for beta in minimizing_betas(t)]
            for value in values[1:]:
                assert value == pytest.approx(values[0], rel=1e-10, abs=1e-10), t

    def test_second_layer_required(self):
        """Test that a single layer is not enough."""
        with pytest.raises(ValueError):
            SecondOrderProblem(1.0, 1.0, BoundaryData.constant(1.0, 2))

    @settings(max_examples=100, deadline=timedelta(seconds=5))
    @given(seed=st.integers(0, 100_000), arity=st.sampled_from([2, 3]), bound=st.integers(2, 6))
    def test_closed_form_matches_oracle(self, seed, arity, bound):
        """Test solve_second_order against the sweep on random compatible problems."""
        p = create_random_second_order_problem(seed, arity)
        w = LatticeWindow.cube(bound if arity == 2 else min(bound, 4), arity)
        closed = solve_second_order_grid(p, w)
        oracle = oracle_second_order(p, w)
        assert closed.max_relative_deviation(oracle) <= 1e-8
        scale = max(1.0, float(np.max(np.abs(closed.values))))
        assert residual_second_order(p, closed) <= 1e-8 * scale
