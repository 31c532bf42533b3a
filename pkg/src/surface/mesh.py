"""
Structured surface grids x_{ij} in R^n with a fixed outer ring.
"""

from typing import List, Tuple

import numpy as np

from src.errors import NonFiniteValue, OutOfRange


class SurfaceGrid:
    """Nodes x_{ij}, i = 0..M, j = 0..N, with parameter steps h1, h2."""

    def __init__(self, nodes: np.ndarray, h1: float, h2: float):
        """
        Initialize a surface grid.

        Args:
            nodes: Array of shape (M + 1, N + 1, n)
            h1: Step in the first parameter (> 0)
            h2: Step in the second parameter (> 0)
        """
        nodes = np.array(nodes, dtype=float)
        if nodes.ndim != 3:
            raise ValueError(f"Nodes must have shape (M+1, N+1, n), got {nodes.shape}")
        if nodes.shape[0] < 3 or nodes.shape[1] < 3:
            raise ValueError(f"Grid needs M >= 2 and N >= 2, got M={nodes.shape[0] - 1}, N={nodes.shape[1] - 1}")
        if nodes.shape[2] < 2:
            raise ValueError(f"Ambient dimension must be >= 2, got {nodes.shape[2]}")
        if h1 <= 0 or h2 <= 0:
            raise ValueError(f"Steps must be positive, got h1={h1}, h2={h2}")
        if not np.all(np.isfinite(nodes)):
            raise NonFiniteValue("Surface grid contains non-finite coordinates")
        self.nodes = nodes
        self.h1 = float(h1)
        self.h2 = float(h2)

    @property
    def M(self) -> int:
        return self.nodes.shape[0] - 1

    @property
    def N(self) -> int:
        return self.nodes.shape[1] - 1

    @property
    def dim(self) -> int:
        return self.nodes.shape[2]

    def node(self, i: int, j: int) -> np.ndarray:
        if not (0 <= i <= self.M and 0 <= j <= self.N):
            raise OutOfRange(f"Node ({i}, {j}) outside {self.M}x{self.N} grid")
        return self.nodes[i, j]

    def boundary_mask(self) -> np.ndarray:
        """True on the fixed outer ring."""
        mask = np.ones((self.M + 1, self.N + 1), dtype=bool)
        mask[1:-1, 1:-1] = False
        return mask

    def interior_nodes(self) -> List[Tuple[int, int]]:
        """Interior (i, j) in row-major order; the order of the stacked unknowns."""
        return [(i, j) for i in range(1, self.M) for j in range(1, self.N)]

    def interior_vector(self) -> np.ndarray:
        return self.nodes[1:-1, 1:-1].reshape(-1).copy()

    def with_interior(self, vector: np.ndarray) -> 'SurfaceGrid':
        nodes = self.nodes.copy()
        nodes[1:-1, 1:-1] = np.asarray(vector, dtype=float).reshape(self.M - 1, self.N - 1, self.dim)
        return SurfaceGrid(nodes, self.h1, self.h2)

    def with_nodes(self, nodes: np.ndarray) -> 'SurfaceGrid':
        return SurfaceGrid(nodes, self.h1, self.h2)

    def copy(self) -> 'SurfaceGrid':
        return SurfaceGrid(self.nodes.copy(), self.h1, self.h2)

    def __repr__(self) -> str:
        return f"SurfaceGrid(M={self.M}, N={self.N}, n={self.dim}, h1={self.h1:g}, h2={self.h2:g})"


def transfinite_interpolation(grid: SurfaceGrid) -> SurfaceGrid:
    """
    Fill the interior from the boundary ring by Coons-patch interpolation.

    Args:
        grid: Grid whose outer ring is kept

    Returns:
        New grid with the same boundary and interpolated interior
    """
    X = grid.nodes
    M, N = grid.M, grid.N
    u = (np.arange(M + 1) / M)[:, None, None]
    v = (np.arange(N + 1) / N)[None, :, None]

    left = X[0:1, :, :]
    right = X[M:M + 1, :, :]
    bottom = X[:, 0:1, :]
    top = X[:, N:N + 1, :]
    corners = (
        (1 - u) * (1 - v) * X[0, 0]
        + u * (1 - v) * X[M, 0]
        + (1 - u) * v * X[0, N]
        + u * v * X[M, N]
    )
    patch = (1 - u) * left + u * right + (1 - v) * bottom + v * top - corners

    nodes = X.copy()
    nodes[1:-1, 1:-1] = patch[1:-1, 1:-1]
    return grid.with_nodes(nodes)


def planar_grid(M: int, N: int, h1: float = 1.0, h2: float = 1.0, dim: int = 3) -> SurfaceGrid:
    """Uniform grid x_{ij} = (i h1, j h2, 0, ...)."""
    nodes = np.zeros((M + 1, N + 1, dim))
    nodes[:, :, 0] = np.arange(M + 1)[:, None] * h1
    nodes[:, :, 1] = np.arange(N + 1)[None, :] * h2
    return SurfaceGrid(nodes, h1, h2)


def saddle_grid(M: int = 9, N: int = 9) -> SurfaceGrid:
    """
    Unit-square grid with boundary on the saddle z = x y.

    The interior starts from transfinite interpolation of the ring.

    Args:
        M: Cells in x
        N: Cells in y

    Returns:
        SurfaceGrid with h1 = 1/M, h2 = 1/N
    """
    h1, h2 = 1.0 / M, 1.0 / N
    x = np.arange(M + 1)[:, None] * h1
    y = np.arange(N + 1)[None, :] * h2
    nodes = np.zeros((M + 1, N + 1, 3))
    nodes[:, :, 0] = x
    nodes[:, :, 1] = y
    nodes[:, :, 2] = x * y
    nodes[1:-1, 1:-1, :] = 0.0
    return transfinite_interpolation(SurfaceGrid(nodes, h1, h2))
