"""
Linear-algebra helpers shared by the solvers.

Matrix powers, ordered products, tolerance-aware comparisons and a
deterministic eigendecomposition.
"""

from typing import Iterable, Tuple

import numpy as np


def as_matrix(value, n: int) -> np.ndarray:
    """
    Coerce a scalar, nested list or array to an n x n float matrix.

    Args:
        value: Scalar (only for n == 1 or meaning value * I), list or array
        n: Matrix dimension

    Returns:
        n x n float ndarray
    """
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        return float(arr) * np.eye(n)
    if arr.shape != (n, n):
        raise ValueError(f"Expected a {n}x{n} matrix, got shape {arr.shape}")
    return arr


def as_vector(value, n: int) -> np.ndarray:
    """
    Coerce a scalar, list or array to a length-n float vector.

    Args:
        value: Scalar (broadcast to every entry), list or array
        n: Vector dimension

    Returns:
        Length-n float ndarray
    """
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        return np.full(n, float(arr))
    arr = arr.reshape(-1)
    if arr.shape != (n,):
        raise ValueError(f"Expected a vector of length {n}, got shape {arr.shape}")
    return arr


def matrix_power(A: np.ndarray, k: int) -> np.ndarray:
    """
    Raise a square matrix to a non-negative integer power.

    Args:
        A: Square matrix
        k: Exponent (k >= 0)

    Returns:
        A^k (identity for k == 0)
    """
    if k < 0:
        raise ValueError(f"Exponent must be non-negative, got {k}")
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"Expected a square matrix, got shape {A.shape}")
    return np.linalg.matrix_power(A, int(k))


def ordered_product(factors: Iterable[np.ndarray], n: int) -> np.ndarray:
    """
    Multiply matrices left to right, in the order given.

    Args:
        factors: Iterable of n x n matrices M1, M2, ..., Mk
        n: Dimension, used for the empty product

    Returns:
        M1 @ M2 @ ... @ Mk, or I_n when there are no factors
    """
    product = np.eye(n)
    for factor in factors:
        product = product @ factor
    return product


def is_integral(value) -> bool:
    """True when every entry of value is a finite whole number."""
    arr = np.asarray(value, dtype=float)
    return bool(np.all(np.isfinite(arr)) and np.all(arr == np.round(arr)))


def values_close(a, b, tol: float = 1e-9) -> bool:
    """
    Compare two values (scalars or arrays) with the library's equality rule.

    Integral-valued operands are compared exactly; anything else within an
    absolute tolerance.

    Args:
        a: First value
        b: Second value
        tol: Absolute tolerance for non-integral values

    Returns:
        True if the values are considered equal
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        return False
    if is_integral(a) and is_integral(b):
        return bool(np.array_equal(a, b))
    return bool(np.all(np.abs(a - b) <= tol))


def max_relative_deviation(a, b) -> float:
    """
    Largest entrywise deviation |a - b| / max(1, |b|).

    Args:
        a: Candidate values
        b: Reference values

    Returns:
        Maximum scaled deviation (0.0 for empty input)
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b))))


def inf_norm(A) -> float:
    """Induced infinity norm (max absolute row sum)."""
    A = np.atleast_2d(np.asarray(A))
    return float(np.linalg.norm(A, ord=np.inf))


def sorted_eig(A: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eigendecomposition with a deterministic ordering.

    Eigenvalues are ordered by descending modulus, then by descending real
    part; eigenvectors (columns) follow the same permutation.

    Args:
        A: Square real matrix

    Returns:
        (eigenvalues, eigenvectors) as complex arrays
    """
    values, vectors = np.linalg.eig(np.asarray(A, dtype=float))
    values = values.astype(complex)
    vectors = vectors.astype(complex)
    # lexsort sorts by the last key first
    order = np.lexsort((-values.imag, -values.real, -np.round(np.abs(values), 12)))
    return values[order], vectors[:, order]
