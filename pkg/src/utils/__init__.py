"""Linear-algebra helpers shared by the solvers."""

from .linalg_helpers import (
    as_matrix,
    as_vector,
    matrix_power,
    ordered_product,
    is_integral,
    values_close,
    max_relative_deviation,
    inf_norm,
    sorted_eig,
)

__all__ = [
    'as_matrix',
    'as_vector',
    'matrix_power',
    'ordered_product',
    'is_integral',
    'values_close',
    'max_relative_deviation',
    'inf_norm',
    'sorted_eig',
]
