"""
Unit Tests for the shared linear-algebra helpers
"""

import numpy as np
import pytest

from src.utils import matrix_power, ordered_product, values_close


class TestMatrixPower:
    """Test cases for matrix_power."""

    def test_zero_exponent_is_identity(self):
        """Test A^0 = I."""
        assert np.array_equal(matrix_power([[2.0, 1.0], [0.0, 3.0]], 0), np.eye(2))

    def test_integer_matrix_stays_exact(self):
        """Test [[1, 1], [1, 0]]^20 against the Fibonacci numbers."""
        assert np.array_equal(matrix_power([[1, 1], [1, 0]], 20), [[10946.0, 6765.0], [6765.0, 4181.0]])

    def test_matches_repeated_products(self):
        """Test against an explicit left-to-right product."""
        A = np.random.default_rng(4).uniform(-1, 1, size=(3, 3))
        for k in range(8):
            assert np.allclose(matrix_power(A, k), ordered_product([A] * k, 3), rtol=1e-12, atol=1e-14)

    @pytest.mark.parametrize('A, k', [([[1.0, 0.0], [0.0, 1.0]], -1), ([1.0, 2.0], 2), ([[1.0, 2.0, 3.0]], 2)])
    def test_invalid_input(self, A, k):
        """Test negative exponents and non-square shapes."""
        with pytest.raises(ValueError):
            matrix_power(A, k)


class TestValuesClose:
    """Test cases for the equality rule."""

    def test_integral_values_compare_exactly(self):
        """Test that whole numbers get no tolerance."""
        assert values_close([1.0, 2.0], [1.0, 2.0])
        assert not values_close([3.0], [4.0], tol=2.0)

    def test_fractional_values_use_tolerance(self):
        """Test the absolute tolerance on non-integral values."""
        assert values_close([0.5], [0.5 + 1e-12])
        assert not values_close([0.5], [0.6])
