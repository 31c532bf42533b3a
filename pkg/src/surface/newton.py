"""
Newton iteration for discrete minimal surfaces with a fixed boundary ring.

Unknowns are the interior node coordinates, stacked row-major. The Jacobian
of the residual is assembled by forward differences into a sparse matrix;
perturbing one node only changes the three cells that contain it, so each
column costs three cell evaluations.
"""

import logging
import warnings
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import MatrixRankWarning, spsolve

from src.errors import NonConvergence, SingularJacobian
from src.surface.geometry import cell_gradients, degenerate_cells, residual_field, total_area
from src.surface.mesh import SurfaceGrid, transfinite_interpolation
from src.surface.metric import MetricField


logger = logging.getLogger(__name__)

# (cell offset, role of the perturbed node in that cell)
_INCIDENT_CELLS = (
    ((0, 0), 'base'),
    ((-1, 0), 'a'),
    ((0, -1), 'b'),
)
_ROLE_OFFSETS = {'base': (0, 0), 'a': (1, 0), 'b': (0, 1)}


@dataclass
class NewtonOptions:
    """Stopping and step-control parameters."""

    tol: float = 1e-10
    max_iter: int = 50
    damping: float = 1.0
    min_step: float = 1.0 / 1024
    fd_step: float = 1e-7

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError(f"Tolerance must be positive, got {self.tol}")
        if self.max_iter < 0:
            raise ValueError(f"max_iter must be non-negative, got {self.max_iter}")
        if not 0 < self.damping <= 1:
            raise ValueError(f"Damping must lie in (0, 1], got {self.damping}")


def _interior_residual(grid: SurfaceGrid, metric: MetricField) -> np.ndarray:
    return residual_field(grid, metric, clamp=True)[1:-1, 1:-1].reshape(-1)


def _unknown_index(grid: SurfaceGrid, i: int, j: int) -> Optional[int]:
    """Position of node (i, j) among the stacked interior nodes, None on the boundary."""
    if 1 <= i <= grid.M - 1 and 1 <= j <= grid.N - 1:
        return (i - 1) * (grid.N - 1) + (j - 1)
    return None


def assemble_jacobian(grid: SurfaceGrid, metric: MetricField, fd_step: float = 1e-7) -> sparse.csc_matrix:
    """
    Forward-difference Jacobian of the interior residual.

    Args:
        grid: Current iterate
        metric: Ambient metric
        fd_step: Relative step; the actual step is fd_step * (1 + |x|)

    Returns:
        Square sparse matrix of size (M - 1)(N - 1) n
    """
    n = grid.dim
    rows, cols, vals = [], [], []
    nodes = grid.nodes.copy()

    for i, j in grid.interior_nodes():
        cells = [((i + di, j + dj), role) for (di, dj), role in _INCIDENT_CELLS]
        base_grads = {cell: cell_gradients(grid, metric, *cell, clamp=True) for cell, _ in cells}
        col_node = _unknown_index(grid, i, j)

        for k in range(n):
            original = nodes[i, j, k]
            step = fd_step * (1.0 + abs(original))
            nodes[i, j, k] = original + step
            trial = grid.with_nodes(nodes)

            changes: Dict[Tuple[int, int], np.ndarray] = {}
            for cell, _ in cells:
                new_grads = cell_gradients(trial, metric, *cell, clamp=True)
                for role, (oi, oj) in _ROLE_OFFSETS.items():
                    target = (cell[0] + oi, cell[1] + oj)
                    delta = new_grads[role] - base_grads[cell][role]
                    changes[target] = changes.get(target, 0.0) + delta
            nodes[i, j, k] = original

            col = col_node * n + k
            for (ti, tj), delta in changes.items():
                row_node = _unknown_index(grid, ti, tj)
                if row_node is None:
                    continue
                for r in range(n):
                    value = delta[r] / step
                    if value != 0.0:
                        rows.append(row_node * n + r)
                        cols.append(col)
                        vals.append(value)

    size = (grid.M - 1) * (grid.N - 1) * n
    return sparse.coo_matrix((vals, (rows, cols)), shape=(size, size)).tocsc()


def _newton_direction(J: sparse.csc_matrix, residual: np.ndarray) -> np.ndarray:
    with warnings.catch_warnings():
        warnings.simplefilter('error', MatrixRankWarning)
        try:
            direction = spsolve(J, -residual)
        except (MatrixRankWarning, RuntimeError) as exc:
            raise SingularJacobian(
                f"Newton Jacobian is singular ({exc}); try --damping below 1 or a different start mesh"
            ) from exc
    direction = np.atleast_1d(np.asarray(direction, dtype=float))
    if not np.all(np.isfinite(direction)):
        raise SingularJacobian("Newton step is not finite; try --damping below 1 or a different start mesh")
    return direction


def _record_degenerate(report: Dict[str, Any], grid: SurfaceGrid, metric: MetricField, iteration: int):
    cells = degenerate_cells(grid, metric)
    if cells:
        report['warnings'].append(
            f"Iteration {iteration}: {len(cells)} degenerate cell(s) clamped, first at {cells[0]}"
        )


def newton_solve(
    grid: SurfaceGrid,
    metric: MetricField,
    opts: Optional[NewtonOptions] = None,
    from_mesh: bool = False
) -> Tuple[SurfaceGrid, Dict[str, Any]]:
    """
    Drive every interior Euler-Lagrange residual to zero.

    Args:
        grid: Grid whose outer ring is the fixed boundary
        metric: Ambient metric
        opts: Newton options
        from_mesh: Start from the grid's own interior instead of transfinite interpolation

    Returns:
        (converged grid, report) where the report holds converged, iterations,
        initial/final residual and area, the residual history, accepted step sizes
        and warnings for iterates with degenerate cells

    Raises:
        NonConvergence: after max_iter iterations or a failed line search (carries the best grid)
        SingularJacobian: if a Newton system cannot be solved
    """
    opts = opts or NewtonOptions()
    if metric.dim != grid.dim:
        raise ValueError(f"Metric dimension {metric.dim} does not match grid dimension {grid.dim}")

    current = grid.copy() if from_mesh else transfinite_interpolation(grid)
    residual = _interior_residual(current, metric)
    norm = float(np.max(np.abs(residual), initial=0.0))

    report: Dict[str, Any] = {
        'converged': False,
        'iterations': 0,
        'initial_residual': norm,
        'final_residual': norm,
        'initial_area': total_area(current, metric),
        'final_area': None,
        'history': [norm],
        'steps': [],
        'metric': metric.name,
        'reason': None,
        'warnings': [],
    }
    _record_degenerate(report, current, metric, 0)

    iteration = 0
    while norm > opts.tol:
        if iteration >= opts.max_iter:
            report['iterations'] = iteration
            report['final_area'] = total_area(current, metric)
            report['reason'] = f"Residual {norm:.3e} above {opts.tol:.1e} after {iteration} iterations"
            raise NonConvergence(report['reason'], grid=current, report=report)

        J = assemble_jacobian(current, metric, opts.fd_step)
        direction = _newton_direction(J, residual)
        base = current.interior_vector()

        step = opts.damping
        while True:
            trial = current.with_interior(base + step * direction)
            trial_residual = _interior_residual(trial, metric)
            trial_norm = float(np.max(np.abs(trial_residual)))
            if np.isfinite(trial_norm) and trial_norm <= norm:
                break
            step /= 2.0
            if step < opts.min_step:
                report['iterations'] = iteration
                report['final_area'] = total_area(current, metric)
                report['reason'] = f"Line search failed at residual {norm:.3e}"
                raise NonConvergence(report['reason'], grid=current, report=report)

        current, residual, norm = trial, trial_residual, trial_norm
        iteration += 1
        report['final_residual'] = norm
        report['history'].append(norm)
        report['steps'].append(step)
        _record_degenerate(report, current, metric, iteration)
        logger.debug("Newton iteration %d: residual %.3e, step %.4g", iteration, norm, step)

    report['converged'] = True
    report['iterations'] = iteration
    report['final_residual'] = norm
    report['final_area'] = total_area(current, metric)
    logger.info("Newton converged in %d iteration(s), residual %.3e", iteration, norm)
    return current, report
