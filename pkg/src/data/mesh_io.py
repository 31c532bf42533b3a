"""
Node-grid mesh files and OBJ export.

Mesh format:
    M N h1 h2
    x y z          (one line per node, (M + 1)(N + 1) lines, i outer and j inner)
"""

import logging

import numpy as np
import pandas as pd

from src.errors import ProblemFileError
from src.surface.mesh import SurfaceGrid


logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.17g'


def _parse_header(path: str, line: str):
    fields = line.split()
    if len(fields) != 4:
        raise ProblemFileError(f"{path}: header must be 'M N h1 h2'", line=1)
    try:
        M, N = int(fields[0]), int(fields[1])
        h1, h2 = float(fields[2]), float(fields[3])
    except ValueError as exc:
        raise ProblemFileError(f"{path}: bad header value ({exc})", line=1) from exc
    if M < 2 or N < 2:
        raise ProblemFileError(f"{path}: need M >= 2 and N >= 2, got {M} {N}", line=1)
    if h1 <= 0 or h2 <= 0:
        raise ProblemFileError(f"{path}: steps must be positive, got {h1} {h2}", line=1)
    return M, N, h1, h2


def read_mesh(path: str) -> SurfaceGrid:
    """
    Load a mesh file.

    Args:
        path: Mesh path

    Returns:
        SurfaceGrid

    Raises:
        ProblemFileError: with the offending line number on malformed input
    """
    try:
        with open(path, 'r') as f:
            header = f.readline()
    except OSError as exc:
        raise ProblemFileError(f"Cannot read mesh '{path}': {exc}") from exc
    M, N, h1, h2 = _parse_header(path, header)
    expected = (M + 1) * (N + 1)

    try:
        frame = pd.read_csv(path, sep=r'\s+', header=None, skiprows=1, dtype=str)
    except pd.errors.EmptyDataError:
        raise ProblemFileError(f"{path}: no node lines after the header", line=2)
    except pd.errors.ParserError as exc:
        raise ProblemFileError(f"{path}: inconsistent node lines ({exc})") from exc

    numeric = frame.apply(pd.to_numeric, errors='coerce')
    bad_rows = numeric.index[numeric.isna().any(axis=1)]
    if len(bad_rows):
        raise ProblemFileError(f"{path}: non-numeric or missing coordinate", line=int(bad_rows[0]) + 2)
    if len(numeric) != expected:
        raise ProblemFileError(
            f"{path}: expected {expected} node lines for a {M}x{N} grid, found {len(numeric)}",
            line=len(numeric) + 2 if len(numeric) < expected else expected + 2,
        )

    nodes = numeric.to_numpy(dtype=float).reshape(M + 1, N + 1, -1)
    return SurfaceGrid(nodes, h1, h2)


def write_mesh(grid: SurfaceGrid, path: str):
    """Write a grid in the mesh format with 17 significant digits."""
    frame = pd.DataFrame(grid.nodes.reshape(-1, grid.dim))
    with open(path, 'w', newline='') as f:
        f.write(f"{grid.M} {grid.N} {grid.h1:.17g} {grid.h2:.17g}\n")
        frame.to_csv(f, sep=' ', header=False, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')


def export_obj(grid: SurfaceGrid, path: str):
    """
    Write a Wavefront OBJ with one vertex per node and two triangles per cell.

    Planar (n = 2) grids are padded with z = 0.

    Args:
        grid: Surface grid with n = 2 or 3
        path: Output path
    """
    if grid.dim > 3:
        raise ValueError(f"OBJ export supports n <= 3, got n = {grid.dim}")
    vertices = grid.nodes.reshape(-1, grid.dim)
    if grid.dim == 2:
        vertices = np.hstack([vertices, np.zeros((vertices.shape[0], 1))])

    def vid(i: int, j: int) -> int:
        return i * (grid.N + 1) + j + 1

    with open(path, 'w', newline='') as f:
        f.write(f"# {grid.M}x{grid.N} grid, {vertices.shape[0]} vertices\n")
        for x, y, z in vertices:
            f.write(f"v {x:.17g} {y:.17g} {z:.17g}\n")
        for i in range(grid.M):
            for j in range(grid.N):
                f.write(f"f {vid(i, j)} {vid(i + 1, j)} {vid(i, j + 1)}\n")
                f.write(f"f {vid(i + 1, j)} {vid(i + 1, j + 1)} {vid(i, j + 1)}\n")
    logger.debug("Exported %d vertices to %s", vertices.shape[0], path)
