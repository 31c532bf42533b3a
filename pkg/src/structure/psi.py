"""
Diagonal-constant sequences and the map psi onto homogeneous solutions.

A sequence y is diagonal-constant when y(t + 1) = y(t). Such sequences are
determined by their values on the hyperplanes t^beta = 0 and play the role
of constants of motion for the diagonal shift. psi multiplies the
accumulated coefficient product into y and yields every solution of
x(t + 1) = A(t) x(t) exactly once.
"""

import logging
from typing import Optional

import numpy as np

from src.config import get_settings
from src.errors import NotASolution, NotDiagonalConstant, ZeroVector
from src.lattice.boundary import BoundaryData, is_diagonal_constant
from src.lattice.indices import IndexLike, LatticeWindow, as_index, diag_shift, argmin_beta, mu
from src.lattice.sequences import MatrixSequence, VectorSequence
from src.solvers.linear import residual_homogeneous


logger = logging.getLogger(__name__)


class DiagonalConstantSeq:
    """A VectorSequence together with the window its diagonal constancy was verified on."""

    def __init__(self, sequence: VectorSequence, window: Optional[LatticeWindow] = None):
        """
        Args:
            sequence: The underlying sequence y
            window: Certificate window; None when constancy holds by construction
        """
        self.sequence = sequence
        self.window = window

    @classmethod
    def certify(cls, y: VectorSequence, w: LatticeWindow, tol: Optional[float] = None) -> 'DiagonalConstantSeq':
        """
        Verify y(t + 1) = y(t) on w and wrap y.

        Raises:
            NotDiagonalConstant: if the check fails on w
        """
        if not is_diagonal_constant(y, w, tol):
            raise NotDiagonalConstant(f"Sequence is not diagonal-constant on {w}")
        return cls(y, w)

    @property
    def arity(self) -> int:
        return self.sequence.arity

    @property
    def dim(self) -> int:
        return self.sequence.dim

    @property
    def by_construction(self) -> bool:
        return self.window is None

    def __call__(self, t: IndexLike) -> np.ndarray:
        return self.sequence(t)

    def __repr__(self) -> str:
        where = 'by construction' if self.window is None else f'on {self.window}'
        return f"DiagonalConstantSeq(arity={self.arity}, dim={self.dim}, {where})"


def psi_apply(A: MatrixSequence, y: DiagonalConstantSeq, t: IndexLike) -> np.ndarray:
    """
    psi(y)(t) = A(t - 1) A(t - 2) ... A(t - mu(t)*1) y(t - mu(t)*1).

    Args:
        A: Coefficient field
        y: Diagonal-constant sequence of the same arity
        t: Lattice point

    Returns:
        Value of the homogeneous solution at t
    """
    t = as_index(t)
    depth = mu(t)
    if depth == 0:
        return y(t)
    product = np.eye(A.dim)
    for k in range(1, depth + 1):
        product = product @ A(diag_shift(t, -k))
    return product @ y(diag_shift(t, -depth))


def psi_inverse(
    A: MatrixSequence,
    x,
    w: LatticeWindow,
    tol: Optional[float] = None
) -> DiagonalConstantSeq:
    """
    The diagonal-constant y with psi(y) = x on w.

    y(t) = x(t - mu(t)*1), evaluated lazily.

    Args:
        A: Coefficient field
        x: Homogeneous solution (VectorSequence or any callable on points)
        w: Window on which x is verified
        tol: Residual tolerance (default from settings)

    Returns:
        DiagonalConstantSeq

    Raises:
        NotASolution: if x fails x(t + 1) = A(t) x(t) on w
    """
    tol = get_settings().tolerance if tol is None else tol
    residual = residual_homogeneous(A, x, w)
    if residual > tol:
        raise NotASolution(f"Sequence violates the homogeneous recurrence on {w} (residual {residual:.3e})")

    def rule(t):
        return x(diag_shift(t, -min(t)))

    y = VectorSequence.from_rule(rule, w.arity, A.dim)
    return DiagonalConstantSeq(y)


def make_yk_generator(k: int, v, arity: int = 2) -> DiagonalConstantSeq:
    """
    The generator y_k(t) = (t^1 - t^2)^k v.

    Args:
        k: Positive exponent
        v: Nonzero direction vector
        arity: Lattice arity m (>= 2)

    Returns:
        DiagonalConstantSeq (constant along diagonals identically)

    Raises:
        ZeroVector: if v = 0
    """
    if k < 1:
        raise ValueError(f"Generator exponent must be positive, got {k}")
    if arity < 2:
        raise ValueError(f"Generators need arity >= 2, got {arity}")
    v = np.atleast_1d(np.asarray(v, dtype=float))
    if not np.any(v):
        raise ZeroVector("Generator direction must be nonzero")

    def rule(t):
        return float(t[0] - t[1]) ** k * v

    return DiagonalConstantSeq(VectorSequence.from_rule(rule, arity, v.shape[0]))


def diagonal_extension(boundary: BoundaryData) -> DiagonalConstantSeq:
    """
    Extend first-layer boundary data constantly along diagonals.

    y(t) = f_beta((t - mu(t)*1) without beta) with beta = argmin_beta(t).
    On compatible data this does not depend on the choice of beta, and
    psi_apply of it is the solution with that boundary and zero forcing.

    Args:
        boundary: Boundary data (first layer is used)

    Returns:
        DiagonalConstantSeq
    """
    def rule(t):
        beta = argmin_beta(t)
        foot = diag_shift(t, -min(t))
        return boundary.value(beta, foot.without(beta))

    return DiagonalConstantSeq(VectorSequence.from_rule(rule, boundary.arity, boundary.dim))
