"""
Materialized solutions on a lattice window.
"""

import numpy as np
import pandas as pd

from src.errors import NonFiniteValue
from src.lattice.indices import IndexLike, LatticeWindow, as_index
from src.lattice.sequences import VectorSequence


class SolutionGrid:
    """x(t) for every point t of a window, stored as an array of shape window.shape + (n,)."""

    def __init__(self, window: LatticeWindow, values: np.ndarray):
        """
        Initialize a solution grid.

        Args:
            window: Evaluation window
            values: Array of shape window.shape + (n,)
        """
        values = np.array(values, dtype=float)
        if values.shape[:-1] != window.shape:
            raise ValueError(
                f"Values of shape {values.shape} do not match window shape {window.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise NonFiniteValue("Solution grid contains non-finite entries")
        values.setflags(write=False)
        self.window = window
        self.values = values

    @property
    def dim(self) -> int:
        return self.values.shape[-1]

    def __getitem__(self, t: IndexLike) -> np.ndarray:
        return self.values[as_index(t).components]

    def as_sequence(self) -> VectorSequence:
        """Table-backed view of the grid."""
        return VectorSequence.from_table(self.window, self.values)

    def restrict(self, window: LatticeWindow) -> 'SolutionGrid':
        """Sub-grid on a smaller window."""
        if window.arity != self.window.arity or any(
            b > own for b, own in zip(window.bounds, self.window.bounds)
        ):
            raise ValueError(f"{window} is not contained in {self.window}")
        slices = tuple(slice(0, b + 1) for b in window.bounds)
        return SolutionGrid(window, self.values[slices])

    def max_deviation(self, other: 'SolutionGrid') -> float:
        """Largest absolute entrywise difference to another grid on the same window."""
        if other.window != self.window or other.dim != self.dim:
            raise ValueError("Grids live on different windows or dimensions")
        if self.values.size == 0:
            return 0.0
        return float(np.max(np.abs(self.values - other.values)))

    def max_relative_deviation(self, other: 'SolutionGrid') -> float:
        """Largest |a - b| / max(1, |b|) against a reference grid."""
        if other.window != self.window or other.dim != self.dim:
            raise ValueError("Grids live on different windows or dimensions")
        scale = np.maximum(1.0, np.abs(other.values))
        return float(np.max(np.abs(self.values - other.values) / scale))

    def to_frame(self) -> pd.DataFrame:
        """
        Tabular form: columns t1..tm, x1..xn, one row per point in lexicographic order.

        Returns:
            DataFrame
        """
        m = self.window.arity
        grids = np.meshgrid(*(np.arange(b + 1) for b in self.window.bounds), indexing='ij')
        data = {f't{alpha + 1}': grids[alpha].reshape(-1).astype(np.int64) for alpha in range(m)}
        flat = self.values.reshape(-1, self.dim)
        for i in range(self.dim):
            data[f'x{i + 1}'] = flat[:, i]
        return pd.DataFrame(data)

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> 'SolutionGrid':
        """
        Rebuild a grid from the tabular form produced by to_frame().

        Args:
            frame: DataFrame with t1..tm and x1..xn columns

        Returns:
            SolutionGrid
        """
        t_cols = [c for c in frame.columns if c.startswith('t')]
        x_cols = [c for c in frame.columns if c.startswith('x')]
        if not t_cols or not x_cols:
            raise ValueError("Frame needs t* and x* columns")
        bounds = tuple(int(frame[c].max()) for c in t_cols)
        window = LatticeWindow(bounds)
        values = np.full(window.shape + (len(x_cols),), np.nan)
        points = frame[t_cols].to_numpy(dtype=np.int64)
        values[tuple(points.T)] = frame[x_cols].to_numpy(dtype=float)
        return cls(window, values)
