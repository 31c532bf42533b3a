"""
Particular solutions of the homogeneous recurrence x(t + 1) = A x(t).

Constant A only. Three families:
    - power solutions A^{<eps, t>} x0 with <eps, 1> = 1, including the
      sum-of-indices case A^{t^1 + ... + t^m} x0 when A^m = A
    - root solutions B^{t^1 + ... + t^m} x0 when B^m = A
    - eigen-mode solutions sum_k c_k lambda_k^{<eps, t>} v_k
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.config import get_settings
from src.errors import (
    InvertibilityError,
    NegativePower,
    NotDiagonalizable,
    NotIdempotentPower,
    UnsupportedMatrix,
)
from src.lattice.indices import IndexLike, as_index, diag_shift, mu
from src.structure.psi import DiagonalConstantSeq
from src.utils.linalg_helpers import inf_norm, matrix_power, sorted_eig


logger = logging.getLogger(__name__)

SINGULAR_DET = 1e-12
MAX_CONDITION = 1e12
ZERO_EIGENVALUE = 1e-14

Mode = Tuple[complex, complex, np.ndarray]


def _square(A) -> np.ndarray:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"Expected a square matrix, got shape {A.shape}")
    return A


def _real_if_close(value: np.ndarray, tol: float) -> np.ndarray:
    if np.max(np.abs(value.imag), initial=0.0) <= tol:
        return value.real.copy()
    return value


def check_power_identity(A, m: int, tol: Optional[float] = None) -> bool:
    """
    True iff ||A^m - A||_inf <= tol.

    Args:
        A: Square matrix
        m: Power (m >= 2)
        tol: Absolute tolerance (default from settings)
    """
    if m < 2:
        raise ValueError(f"Power identity needs m >= 2, got {m}")
    A = _square(A)
    tol = get_settings().tolerance if tol is None else tol
    return inf_norm(matrix_power(A, m) - A) <= tol


def sum_power_solution(A, x0, t: IndexLike, tol: Optional[float] = None) -> np.ndarray:
    """
    x(t) = A^{t^1 + ... + t^m} x0, a solution when A^m = A.

    Args:
        A: Square matrix with A^m = A, m the arity of t
        x0: Initial vector
        t: Lattice point

    Returns:
        x(t)

    Raises:
        NotIdempotentPower: if A^m != A
    """
    t = as_index(t)
    A = _square(A)
    if not check_power_identity(A, t.arity, tol):
        raise NotIdempotentPower(f"A^{t.arity} != A; the sum-of-indices power is not a solution")
    return matrix_power(A, sum(t.components)) @ np.asarray(x0, dtype=float)


def matrix_mth_root(A, m: int) -> np.ndarray:
    """
    Principal real m-th root of a real-diagonalizable matrix with positive eigenvalues.

    Args:
        A: Square matrix
        m: Root order (m >= 2)

    Returns:
        B = V diag(lambda_i^(1/m)) V^-1 with B^m = A

    Raises:
        UnsupportedMatrix: for defective matrices or eigenvalues that are not real and positive
    """
    if m < 2:
        raise ValueError(f"Root order must be >= 2, got {m}")
    A = _square(A)
    values, vectors = sorted_eig(A)
    scale = max(1.0, float(np.max(np.abs(values), initial=0.0)))
    if np.any(np.abs(values.imag) > 1e-12 * scale) or np.any(values.real <= 0):
        raise UnsupportedMatrix(f"Eigenvalues {values} are not all real and positive")
    if np.linalg.cond(vectors) > MAX_CONDITION:
        raise UnsupportedMatrix("Matrix is defective (eigenvectors do not span)")

    V = vectors.real
    roots = values.real ** (1.0 / m)
    B = V @ np.diag(roots) @ np.linalg.inv(V)
    error = inf_norm(matrix_power(B, m) - A)
    if error > 1e-8 * max(1.0, inf_norm(A)):
        raise UnsupportedMatrix(f"Root extraction lost accuracy (||B^m - A|| = {error:.3e})")
    return B


def root_solution(B, m: int, x0, t: IndexLike) -> np.ndarray:
    """
    x(t) = B^{t^1 + ... + t^m} x0, a solution of x(t + 1) = B^m x(t).

    Args:
        B: Square matrix
        m: Arity
        x0: Initial vector
        t: Lattice point of arity m
    """
    t = as_index(t)
    if t.arity != m:
        raise ValueError(f"Point {t.components} does not have arity {m}")
    return matrix_power(_square(B), sum(t.components)) @ np.asarray(x0, dtype=float)


def epsilon_power_solution(A, epsilon: Sequence[int], x0, t: IndexLike) -> np.ndarray:
    """
    x(t) = A^{<eps, t>} x0 with <eps, 1> = 1.

    Negative exponents use A^-1.

    Args:
        A: Square matrix
        epsilon: Integer weights summing to 1
        x0: Initial vector
        t: Lattice point of arity len(epsilon)

    Raises:
        InvertibilityError: if A is singular and some weight is negative
    """
    t = as_index(t)
    A = _square(A)
    epsilon = tuple(int(e) for e in epsilon)
    if len(epsilon) != t.arity:
        raise ValueError(f"Weights {epsilon} do not match arity {t.arity}")
    if sum(epsilon) != 1:
        raise ValueError(f"Weights must sum to 1, got {epsilon}")
    if any(e < 0 for e in epsilon) and abs(np.linalg.det(A)) <= SINGULAR_DET:
        raise InvertibilityError("Negative weights need an invertible matrix")

    exponent = sum(e * c for e, c in zip(epsilon, t.components))
    x0 = np.asarray(x0, dtype=float)
    if exponent >= 0:
        return matrix_power(A, exponent) @ x0
    return matrix_power(np.linalg.inv(A), -exponent) @ x0


@dataclass
class EigenModeSolution:
    """sum_k c_k lambda_k^{<eps, t>} v_k."""

    epsilon: Tuple[int, ...]
    modes: List[Mode]
    A: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        self.epsilon = tuple(int(e) for e in self.epsilon)
        if sum(self.epsilon) != 1:
            raise ValueError(f"Weights must sum to 1, got {self.epsilon}")
        self.modes = [
            (complex(c), complex(lam), np.asarray(v, dtype=complex)) for c, lam, v in self.modes
        ]
        if self.has_zero_mode and min(self.epsilon) < 0:
            raise NegativePower(f"Zero eigenvalue with negative weights {self.epsilon}")
        if self.A is not None:
            self.A = _square(self.A)
            for c, lam, v in self.modes:
                if np.max(np.abs(self.A @ v - lam * v)) > 1e-9:
                    raise ValueError(f"({lam}, {v}) is not an eigenpair of A")

    @property
    def arity(self) -> int:
        return len(self.epsilon)

    @property
    def has_zero_mode(self) -> bool:
        return any(abs(lam) <= ZERO_EIGENVALUE for _, lam, _ in self.modes)

    def exponent(self, t: IndexLike) -> int:
        return sum(e * c for e, c in zip(self.epsilon, as_index(t).components))


def eigen_mode_value(s: EigenModeSolution, t: IndexLike, tol: Optional[float] = None) -> np.ndarray:
    """
    Evaluate an eigen-mode solution at t.

    Args:
        s: Eigen-mode solution
        t: Lattice point of arity len(eps)
        tol: Imaginary parts up to tol are dropped

    Returns:
        Real array when the imaginary part is negligible, otherwise a complex array
    """
    t = as_index(t)
    if t.arity != s.arity:
        raise ValueError(f"Point {t.components} does not have arity {s.arity}")
    tol = get_settings().tolerance if tol is None else tol
    e = s.exponent(t)

    value = np.zeros_like(s.modes[0][2])
    for c, lam, v in s.modes:
        value = value + c * lam ** e * v
    result = _real_if_close(value, tol)
    if np.iscomplexobj(result):
        logger.debug("Eigen-mode value at %s is complex (|imag| up to %.3e)", t.components, np.max(np.abs(value.imag)))
    return result


def _diagonalize(A: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    values, vectors = sorted_eig(A)
    if np.linalg.cond(vectors) > MAX_CONDITION:
        raise NotDiagonalizable("Eigenvector matrix is numerically singular")
    return values, vectors


def fit_modes(A, alpha: int, h, arity: int) -> EigenModeSolution:
    """
    Single-axis eigen-mode solution x(t) = sum_k c_k lambda_k^{t^alpha} v_k with x = h on t^alpha = 0.

    Args:
        A: Diagonalizable square matrix
        alpha: 1-based axis carrying the exponent
        h: Value on t^alpha = 0
        arity: Lattice arity m

    Returns:
        EigenModeSolution with eps = e_alpha

    Raises:
        NotDiagonalizable: if the eigenvectors do not span
    """
    if not 1 <= alpha <= arity:
        raise ValueError(f"Axis {alpha} out of range for arity {arity}")
    A = _square(A)
    values, vectors = _diagonalize(A)
    coefficients = np.linalg.solve(vectors, np.asarray(h, dtype=complex))
    epsilon = tuple(1 if beta == alpha else 0 for beta in range(1, arity + 1))
    modes = [(coefficients[k], values[k], vectors[:, k]) for k in range(len(values))]
    return EigenModeSolution(epsilon, modes, A)


def general_mode_solution(A, y: DiagonalConstantSeq, t: IndexLike, tol: Optional[float] = None) -> np.ndarray:
    """
    x(t) = sum_k c_k(t) lambda_k^{mu(t)} v_k with c(t) = V^-1 y(t - mu(t)*1).

    The coefficients are diagonal-constant because y is, so this is the
    solution whose restriction to the hyperplanes equals that of y.

    Args:
        A: Diagonalizable square matrix
        y: Diagonal-constant sequence carrying the initial conditions
        t: Lattice point
        tol: Imaginary parts up to tol are dropped

    Returns:
        x(t)
    """
    t = as_index(t)
    A = _square(A)
    tol = get_settings().tolerance if tol is None else tol
    values, vectors = _diagonalize(A)
    depth = mu(t)
    coefficients = np.linalg.solve(vectors, np.asarray(y(diag_shift(t, -depth)), dtype=complex))
    value = vectors @ (values ** depth * coefficients)
    return _real_if_close(value, tol)
