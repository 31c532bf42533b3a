"""Closed-form solvers for diagonal recurrences and their brute-force oracles."""

from .grid import SolutionGrid
from .linear import (
    FirstOrderProblem,
    solve_single_time,
    solve_at,
    solve_constant_A,
    oracle_iterate,
    solve_grid,
    residual_first_order,
    residual_homogeneous,
)
from .second_order import (
    Eigen2,
    SecondOrderProblem,
    classify_eigen,
    power_coefficients,
    matrix_power_2x2,
    solve_second_order,
    solve_second_order_grid,
    oracle_second_order,
    residual_second_order,
)
from .higher_order import (
    OrderKProblem,
    CompanionSystem,
    build_companion,
    companion_problem,
    validate_layers,
    solve_order_k,
    solve_order_k_grid,
    solve_companion_grid,
    oracle_order_k,
    residual_order_k,
    from_second_order,
)

__all__ = [
    'SolutionGrid',
    'FirstOrderProblem',
    'solve_single_time',
    'solve_at',
    'solve_constant_A',
    'oracle_iterate',
    'solve_grid',
    'residual_first_order',
    'residual_homogeneous',
    'Eigen2',
    'SecondOrderProblem',
    'classify_eigen',
    'power_coefficients',
    'matrix_power_2x2',
    'solve_second_order',
    'solve_second_order_grid',
    'oracle_second_order',
    'residual_second_order',
    'OrderKProblem',
    'CompanionSystem',
    'build_companion',
    'companion_problem',
    'validate_layers',
    'solve_order_k',
    'solve_order_k_grid',
    'solve_companion_grid',
    'oracle_order_k',
    'residual_order_k',
    'from_second_order',
]
