"""
Unit Tests for lattice arithmetic, sequences and boundary data

Run with: python -m pytest tests/
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.errors import IncompatibleBoundary, NegativeIndex, NonFiniteValue, OutOfWindow
from src.lattice import (
    BoundaryData,
    LatticeWindow,
    MatrixSequence,
    MultiIndex,
    VectorSequence,
    argmin_beta,
    check_compatibility,
    check_shell,
    diag_shift,
    insert_coordinate,
    is_diagonal_constant,
    minimizing_betas,
    mu,
    shell_value,
)
from tests.helpers import create_full_sequence


class TestMultiIndex:
    """Test cases for lattice points and diagonal moves."""

    def test_negative_component_rejected(self):
        """Test that points outside N^m cannot be built."""
        with pytest.raises(NegativeIndex):
            MultiIndex((1, -1))

    def test_mu_is_minimum_component(self):
        """Test mu on a trivariate point."""
        assert mu((3, 1, 2)) == 1
        assert mu(MultiIndex.of(0, 5)) == 0

    def test_diag_shift_moves_every_component(self):
        """Test shifting down the diagonal to the hyperplane."""
        assert diag_shift((2, 3), -2) == MultiIndex((0, 1))
        assert diag_shift((2, 3), 1) == MultiIndex((3, 4))

    def test_diag_shift_below_zero_raises(self):
        """Test that shifting past the hyperplane is an error."""
        with pytest.raises(NegativeIndex):
            diag_shift((1, 2), -2)

    def test_argmin_breaks_ties_towards_smallest(self):
        """Test the tie-breaking rule for the hyperplane choice."""
        assert minimizing_betas((2, 1, 1)) == [2, 3]
        assert argmin_beta((2, 1, 1)) == 2

    def test_without_and_insert_are_inverse(self):
        """Test that removing and reinserting a coordinate restores the point."""
        t = MultiIndex.of(4, 7, 1)
        for beta in (1, 2, 3):
            assert insert_coordinate(t.without(beta), beta, t.coordinate(beta)) == t.components


class TestLatticeWindow:
    """Test cases for evaluation windows."""

    def test_size_and_shape(self):
        """Test that a window [0,3]^2 holds 16 points."""
        w = LatticeWindow((3, 3))
        assert w.shape == (4, 4)
        assert w.size == 16
        assert len(list(w.points())) == 16

    def test_bounds_must_be_positive(self):
        """Test that degenerate windows are rejected."""
        with pytest.raises(ValueError):
            LatticeWindow((3, 0))

    def test_points_by_mu_order(self):
        """Test that the sweep order never visits a point before its diagonal predecessor."""
        w = LatticeWindow((3, 2, 4))
        seen = set()
        for t in w.points_by_mu():
            if min(t) > 0:
                assert tuple(c - 1 for c in t) in seen
            seen.add(t)

    def test_hyperplane_window(self):
        """Test the argument window of one family."""
        assert LatticeWindow((2, 5, 7)).without(2) == LatticeWindow((2, 7))


class TestSequences:
    """Test cases for coefficient and value fields."""

    def test_constant_vector(self):
        """Test that a constant sequence ignores its argument."""
        v = VectorSequence.constant([1.0, 2.0], 2)
        assert np.array_equal(v((5, 9)), [1.0, 2.0])
        assert v.is_constant

    def test_scalar_matrix_rule_broadcasts_to_identity(self):
        """Test that a scalar-valued matrix rule means a multiple of the identity."""
        A = MatrixSequence.from_rule(lambda t: sum(t) + 1, 2, 3)
        assert np.array_equal(A((1, 2)), 4.0 * np.eye(3))

    def test_table_lookup_outside_window(self):
        """Test that table-backed sequences refuse points they do not store."""
        w = LatticeWindow((2, 2))
        v = VectorSequence.from_table(w, np.arange(9.0).reshape(3, 3))
        assert v((1, 2))[0] == 5.0
        with pytest.raises(OutOfWindow):
            v((3, 0))

    def test_non_finite_value_raises(self):
        """Test that NaN produced by a rule is reported."""
        v = VectorSequence.from_rule(lambda t: float('nan'), 2, 1)
        with pytest.raises(NonFiniteValue):
            v((0, 0))


class TestCompatibility:
    """Test cases for the hyperplane intersection conditions."""

    def test_constant_data_is_compatible(self):
        """Test that identical constant families pass."""
        bd = BoundaryData.constant(1.0, 3)
        report = check_compatibility(bd, LatticeWindow((3, 3, 3)))
        assert report['pass'] is True
        assert report['violations'] == []
        assert report['details']['points_checked'] > 0

    def test_origin_mismatch_single_violation(self):
        """Test that f1(0) != f2(0) gives exactly one violation at the origin."""
        bd = BoundaryData(2, 1, [VectorSequence.constant(0.0, 1), VectorSequence.constant(1.0, 1)])
        report = check_compatibility(bd, LatticeWindow((3, 3)))
        assert report['pass'] is False
        assert len(report['violations']) == 1
        assert report['violations'][0]['point'] == (0, 0)
        assert report['violations'][0]['condition'] == 'f-f'

    def test_reduced_window_is_accepted(self):
        """Test that the window may be given as the families' argument box."""
        bd = BoundaryData(
            3, 1,
            [VectorSequence.from_rule(lambda s: s[0] + s[1], 2, 1)] * 3,
        )
        assert check_compatibility(bd, LatticeWindow((4, 4)))['pass'] is True

    def test_second_layer_corner_condition(self):
        """Test that f = 0 with g = 1 violates the f/g corner condition."""
        bd = BoundaryData.constant(0.0, 2, layers=2, second_value=1.0)
        report = check_compatibility(bd, LatticeWindow((4, 4)))
        assert report['pass'] is False
        assert {v['condition'] for v in report['violations']} == {'f-g'}

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 10_000), arity=st.integers(2, 3), layers=st.integers(1, 2))
    def test_restriction_of_full_sequence_is_compatible(self, seed, arity, layers):
        """Test that every restriction of one sequence to its hyperplanes passes."""
        full = create_full_sequence(seed, arity, 2)
        bd = BoundaryData.from_full_sequence(full, arity, 2, layers=layers)
        assert check_compatibility(bd, LatticeWindow.cube(3, arity))['pass'] is True

    def test_restriction_reproduces_values(self):
        """Test that restricted families return the full sequence on their hyperplane."""
        full = create_full_sequence(7, 3, 1)
        bd = BoundaryData.from_full_sequence(full, 3, 1, layers=2)
        assert np.array_equal(bd.value(2, (3, 1)), full((3, 0, 1)))
        assert np.array_equal(bd.value(3, (2, 4), layer=1), full((2, 4, 1)))


class TestDiagonalConstancy:
    """Test cases for diagonal-constant sequences and shell agreement."""

    def test_index_difference_is_diagonal_constant(self):
        """Test that t1 - t2 is invariant under the diagonal shift."""
        y = VectorSequence.from_rule(lambda t: t[0] - t[1], 2, 1)
        assert is_diagonal_constant(y, LatticeWindow((5, 5)))

    def test_single_coordinate_is_not(self):
        """Test that t1 alone changes along diagonals."""
        y = VectorSequence.from_rule(lambda t: t[0], 2, 1)
        assert not is_diagonal_constant(y, LatticeWindow((5, 5)))

    def test_shell_disagreement_detected(self):
        """Test that constant layers with different values conflict at (1, 0)."""
        zero = [VectorSequence.constant(0.0, 1)] * 2
        one = [VectorSequence.constant(1.0, 1)] * 2
        report = check_shell([zero, one], LatticeWindow((3, 3)))
        assert report['pass'] is False
        with pytest.raises(IncompatibleBoundary):
            shell_value([zero, one], (1, 0))

    def test_shell_value_from_agreeing_layers(self):
        """Test that agreeing layers return their common value."""
        full = create_full_sequence(3, 2, 1)
        layers = [BoundaryData.from_full_sequence(full, 2, 1, level=j).first for j in range(3)]
        assert np.array_equal(shell_value(layers, (2, 5)), full((2, 5)))
        assert check_shell(layers, LatticeWindow((4, 4)))['pass'] is True
