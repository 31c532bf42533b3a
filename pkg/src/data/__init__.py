"""Problem files, solution grid CSVs and surface mesh files."""

from .grid_io import grid_to_csv, write_grid, read_grid
from .mesh_io import read_mesh, write_mesh, export_obj
from .problem_loader import (
    KINDS,
    ProblemSpec,
    load_problem,
    parse_window,
    vector_spec,
    matrix_spec,
    boundary_families,
    build_first_order,
    build_second_order,
    build_order_k,
    special_settings,
    surface_settings,
)

__all__ = [
    'grid_to_csv',
    'write_grid',
    'read_grid',
    'read_mesh',
    'write_mesh',
    'export_obj',
    'KINDS',
    'ProblemSpec',
    'load_problem',
    'parse_window',
    'vector_spec',
    'matrix_spec',
    'boundary_families',
    'build_first_order',
    'build_second_order',
    'build_order_k',
    'special_settings',
    'surface_settings',
]
