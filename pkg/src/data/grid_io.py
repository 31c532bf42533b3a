"""
CSV serialization of solution grids.

One row per lattice point in lexicographic order, columns t1..tm, x1..xn.
Floats are written with 17 significant digits, which round-trips doubles.
"""

import sys
from typing import Optional

import pandas as pd

from src.errors import ProblemFileError
from src.solvers.grid import SolutionGrid


FLOAT_FORMAT = '%.17g'


def grid_to_csv(grid: SolutionGrid) -> str:
    """CSV text of a grid."""
    return grid.to_frame().to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator='\n')


def write_grid(grid: SolutionGrid, path: str):
    """
    Write a grid as CSV.

    Args:
        grid: Solution grid
        path: Output path, or '-' for stdout
    """
    text = grid_to_csv(grid)
    if path == '-':
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, 'w', newline='') as f:
        f.write(text)


def read_grid(path: str, dim: Optional[int] = None) -> SolutionGrid:
    """
    Read a grid written by write_grid.

    Args:
        path: CSV path
        dim: Expected value dimension, checked when given

    Returns:
        SolutionGrid

    Raises:
        ProblemFileError: if the file is not a complete grid table
    """
    try:
        frame = pd.read_csv(path, float_precision='round_trip')
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise ProblemFileError(f"Cannot read grid '{path}': {exc}") from exc

    try:
        grid = SolutionGrid.from_frame(frame)
    except Exception as exc:
        raise ProblemFileError(f"'{path}' is not a complete grid table: {exc}") from exc
    if dim is not None and grid.dim != dim:
        raise ProblemFileError(f"'{path}' has {grid.dim} value column(s), expected {dim}")
    return grid
