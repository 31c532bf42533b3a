"""Particular solutions of constant-coefficient homogeneous recurrences."""

from .solutions import (
    EigenModeSolution,
    check_power_identity,
    sum_power_solution,
    matrix_mth_root,
    root_solution,
    epsilon_power_solution,
    eigen_mode_value,
    fit_modes,
    general_mode_solution,
)

__all__ = [
    'EigenModeSolution',
    'check_power_identity',
    'sum_power_solution',
    'matrix_mth_root',
    'root_solution',
    'epsilon_power_solution',
    'eigen_mode_value',
    'fit_modes',
    'general_mode_solution',
]
