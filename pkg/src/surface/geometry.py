"""
Centroid-rule discretization of the area functional.

Cell (i, j) is the triangle of nodes p = x_{ij}, a = x_{i+1,j}, b = x_{i,j+1}.
Its velocities are u1 = (a - p) / h1 and u2 = (b - p) / h2, the metric is
frozen at the centroid xi = (p + a + b) / 3 and the induced metric is
H_ab = u_a . g(xi) u_b. The discrete Lagrangian is L = sqrt(det H), and the
discrete action is h1 h2 times the sum of L over all cells.

The Euler-Lagrange residual at an interior node is the gradient of the sum
of L over the three cells containing it: its own cell (i, j), the cell to the
left (i - 1, j) and the cell below (i, j - 1).
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from src.errors import DegenerateCell, OutOfRange
from src.surface.mesh import SurfaceGrid
from src.surface.metric import MetricField


logger = logging.getLogger(__name__)

DEGENERACY_FLOOR = 1e-14

# role of a node in a cell -> derivative of (u1, u2) w.r.t. that node, in units of (1/h1, 1/h2)
_ROLE_WEIGHTS = {
    'base': (-1.0, -1.0),
    'a': (1.0, 0.0),
    'b': (0.0, 1.0),
}


@dataclass
class CellGeometry:
    """Discrete geometry of one cell."""

    index: Tuple[int, int]
    centroid: np.ndarray
    velocities: np.ndarray
    metric: np.ndarray
    det: float
    inverse: np.ndarray
    lagrangian: float
    degenerate: bool = False


def _check_cell(grid: SurfaceGrid, i: int, j: int):
    if not (0 <= i < grid.M and 0 <= j < grid.N):
        raise OutOfRange(f"Cell ({i}, {j}) outside {grid.M}x{grid.N} grid")


def centroid(grid: SurfaceGrid, i: int, j: int) -> np.ndarray:
    """
    Centroid (x_{ij} + x_{i+1,j} + x_{i,j+1}) / 3 of cell (i, j).

    Raises:
        OutOfRange: if the cell is not part of the grid
    """
    _check_cell(grid, i, j)
    X = grid.nodes
    return (X[i, j] + X[i + 1, j] + X[i, j + 1]) / 3.0


def cell_geometry(
    grid: SurfaceGrid,
    metric: MetricField,
    i: int,
    j: int,
    clamp: bool = False
) -> CellGeometry:
    """
    Induced metric, determinant, inverse and Lagrangian of cell (i, j).

    Args:
        grid: Surface grid
        metric: Ambient metric
        i: First cell index (0..M-1)
        j: Second cell index (0..N-1)
        clamp: Replace det by the degeneracy floor instead of raising

    Returns:
        CellGeometry

    Raises:
        DegenerateCell: if det H <= 1e-14 and clamp is False
    """
    _check_cell(grid, i, j)
    X = grid.nodes
    p = X[i, j]
    velocities = np.stack([(X[i + 1, j] - p) / grid.h1, (X[i, j + 1] - p) / grid.h2])
    xi = (p + X[i + 1, j] + X[i, j + 1]) / 3.0
    G = metric.g(xi)
    H = velocities @ G @ velocities.T
    H = 0.5 * (H + H.T)
    det = float(H[0, 0] * H[1, 1] - H[0, 1] * H[1, 0])

    degenerate = det <= DEGENERACY_FLOOR
    if degenerate:
        if not clamp:
            raise DegenerateCell(f"Cell ({i}, {j}) is degenerate (det = {det:.3e})")
        logger.warning("Degenerate cell (%d, %d), det=%.3e clamped to %.0e", i, j, det, DEGENERACY_FLOOR)
        det = DEGENERACY_FLOOR

    inverse = np.array([[H[1, 1], -H[0, 1]], [-H[1, 0], H[0, 0]]]) / det
    return CellGeometry(
        index=(i, j),
        centroid=xi,
        velocities=velocities,
        metric=H,
        det=det,
        inverse=inverse,
        lagrangian=float(np.sqrt(det)),
        degenerate=degenerate,
    )


def cell_lagrangian(grid: SurfaceGrid, metric: MetricField, i: int, j: int) -> float:
    """sqrt(max(det H, 0)) without degeneracy handling."""
    X = grid.nodes
    p = X[i, j]
    velocities = np.stack([(X[i + 1, j] - p) / grid.h1, (X[i, j + 1] - p) / grid.h2])
    G = metric.g((p + X[i + 1, j] + X[i, j + 1]) / 3.0)
    H = velocities @ G @ velocities.T
    return float(np.sqrt(max(H[0, 0] * H[1, 1] - H[0, 1] * H[1, 0], 0.0)))


def cell_gradients(
    grid: SurfaceGrid,
    metric: MetricField,
    i: int,
    j: int,
    clamp: bool = False
) -> Dict[str, np.ndarray]:
    """
    Gradient of L for cell (i, j) with respect to each of its three nodes.

    dL = (sqrt(d) / 2) sum_ab Hinv_ab dH_ab with
    dH_ab / dx^k = (1/3) u_a . dg_k u_b + du_a (g u_b)_k + du_b (g u_a)_k.

    Returns:
        {'base': dL/dx_{ij}, 'a': dL/dx_{i+1,j}, 'b': dL/dx_{i,j+1}}
    """
    cell = cell_geometry(grid, metric, i, j, clamp=clamp)
    u = cell.velocities
    G = metric.g(cell.centroid)
    dG = metric.dg(cell.centroid)
    root = cell.lagrangian

    # every node of the cell moves the centroid by 1/3 of its own displacement
    centroid_term = np.einsum('ab,ai,ijk,bj->k', cell.inverse, u, dG, u) / 6.0
    steps = np.array([1.0 / grid.h1, 1.0 / grid.h2])

    gradients = {}
    for role, weights in _ROLE_WEIGHTS.items():
        du = np.asarray(weights) * steps
        w = du @ cell.inverse @ u
        gradients[role] = root * (centroid_term + G @ w)
    return gradients


def el_residual(grid: SurfaceGrid, metric: MetricField, i: int, j: int, clamp: bool = False) -> np.ndarray:
    """
    Discrete Euler-Lagrange residual at interior node (i, j).

    Sum of dL/dx_{ij} over the cells (i, j), (i - 1, j) and (i, j - 1).

    Raises:
        OutOfRange: if (i, j) is not an interior node
        DegenerateCell: propagated from the incident cells unless clamp is set
    """
    if not (1 <= i <= grid.M - 1 and 1 <= j <= grid.N - 1):
        raise OutOfRange(f"Node ({i}, {j}) is not interior to the {grid.M}x{grid.N} grid")
    return (
        cell_gradients(grid, metric, i, j, clamp)['base']
        + cell_gradients(grid, metric, i - 1, j, clamp)['a']
        + cell_gradients(grid, metric, i, j - 1, clamp)['b']
    )


def residual_field(grid: SurfaceGrid, metric: MetricField, clamp: bool = True) -> np.ndarray:
    """
    Residuals at every node, assembled cell by cell.

    Returns:
        Array of shape (M + 1, N + 1, n); boundary entries are zero
    """
    field = np.zeros_like(grid.nodes)
    for i in range(grid.M):
        for j in range(grid.N):
            gradients = cell_gradients(grid, metric, i, j, clamp)
            field[i, j] += gradients['base']
            field[i + 1, j] += gradients['a']
            field[i, j + 1] += gradients['b']
    field[grid.boundary_mask()] = 0.0
    return field


def total_area(grid: SurfaceGrid, metric: MetricField) -> float:
    """
    Discrete action h1 h2 sum L over all cells.

    Degenerate cells contribute their (possibly zero) L without raising.
    """
    total = 0.0
    degenerate = 0
    for i in range(grid.M):
        for j in range(grid.N):
            L = cell_lagrangian(grid, metric, i, j)
            if L * L <= DEGENERACY_FLOOR:
                degenerate += 1
            total += L
    if degenerate:
        logger.debug("%d degenerate cell(s) in area sum", degenerate)
    return grid.h1 * grid.h2 * total


def degenerate_cells(grid: SurfaceGrid, metric: MetricField) -> List[Tuple[int, int]]:
    """Cells whose det H is at or below the degeneracy floor."""
    return [
        (i, j)
        for i in range(grid.M)
        for j in range(grid.N)
        if cell_lagrangian(grid, metric, i, j) ** 2 <= DEGENERACY_FLOOR
    ]
