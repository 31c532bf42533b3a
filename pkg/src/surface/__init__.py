"""Discrete minimal surfaces: metrics, grids, cell geometry and the Newton integrator."""

from .metric import MetricField
from .mesh import SurfaceGrid, transfinite_interpolation, planar_grid, saddle_grid
from .geometry import (
    CellGeometry,
    centroid,
    cell_geometry,
    cell_gradients,
    el_residual,
    residual_field,
    total_area,
    degenerate_cells,
)
from .newton import NewtonOptions, assemble_jacobian, newton_solve

__all__ = [
    'MetricField',
    'SurfaceGrid',
    'transfinite_interpolation',
    'planar_grid',
    'saddle_grid',
    'CellGeometry',
    'centroid',
    'cell_geometry',
    'cell_gradients',
    'el_residual',
    'residual_field',
    'total_area',
    'degenerate_cells',
    'NewtonOptions',
    'assemble_jacobian',
    'newton_solve',
]
