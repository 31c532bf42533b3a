"""
Coefficient and value fields on the lattice.

A MatrixSequence is A(t) (n x n) and a VectorSequence is b(t) or x(t) (R^n).
Both are backed by a constant, a table stored on a window, or a rule
t -> value. Backings follow a common abstract interface so new sources can be
added without touching the solvers.
"""

from abc import ABC, abstractmethod
from typing import Callable, Optional, Tuple

import numpy as np

from src.errors import NonFiniteValue, OutOfWindow
from src.lattice.indices import IndexLike, LatticeWindow, MultiIndex
from src.utils.linalg_helpers import as_matrix, as_vector


Point = Tuple[int, ...]


class SequenceBacking(ABC):
    """Abstract source of sequence values."""

    kind = 'abstract'

    @abstractmethod
    def value(self, point: Point) -> np.ndarray:
        """
        Value at a lattice point.

        Args:
            point: Tuple of non-negative integers

        Returns:
            Raw value (converted and validated by the owning sequence)
        """
        pass

    def covers(self, point: Point) -> bool:
        """True if the backing can produce a value at point."""
        return True


class ConstantBacking(SequenceBacking):
    """The same value at every point."""

    kind = 'constant'

    def __init__(self, value: np.ndarray):
        self._value = np.array(value, dtype=float)
        self._value.setflags(write=False)

    def value(self, point: Point) -> np.ndarray:
        return self._value


class TableBacking(SequenceBacking):
    """Values tabulated on a window; lookups outside it are errors."""

    kind = 'table'

    def __init__(self, window: LatticeWindow, values: np.ndarray):
        values = np.array(values, dtype=float)
        if values.shape[:window.arity] != window.shape:
            raise ValueError(
                f"Table shape {values.shape} does not start with window shape {window.shape}"
            )
        values.setflags(write=False)
        self.window = window
        self._values = values

    def covers(self, point: Point) -> bool:
        return self.window.contains(point)

    def value(self, point: Point) -> np.ndarray:
        if not self.window.contains(point):
            raise OutOfWindow(f"Point {point} lies outside the table window {self.window.bounds}")
        return self._values[point]


class RuleBacking(SequenceBacking):
    """Values computed by a callable taking the point tuple."""

    kind = 'rule'

    def __init__(self, rule: Callable[[Point], object]):
        self.rule = rule

    def value(self, point: Point) -> np.ndarray:
        return self.rule(point)


class _LatticeSequence:
    """Shared evaluation logic; subclasses fix the value shape."""

    def __init__(self, arity: int, dim: int, backing: SequenceBacking):
        if arity < 1:
            raise ValueError(f"Sequence arity must be >= 1, got {arity}")
        if dim < 1:
            raise ValueError(f"Sequence dimension must be >= 1, got {dim}")
        self.arity = int(arity)
        self.dim = int(dim)
        self.backing = backing

    def _coerce(self, raw) -> np.ndarray:
        raise NotImplementedError

    @staticmethod
    def _point(t: IndexLike) -> Point:
        if isinstance(t, MultiIndex):
            return t.components
        return tuple(int(c) for c in t)

    def __call__(self, t: IndexLike) -> np.ndarray:
        point = self._point(t)
        if len(point) != self.arity:
            raise ValueError(f"Expected a point of arity {self.arity}, got {point}")
        value = self._coerce(self.backing.value(point))
        if not np.all(np.isfinite(value)):
            raise NonFiniteValue(f"Non-finite value at {point}")
        return value

    def covers(self, t: IndexLike) -> bool:
        return self.backing.covers(self._point(t))

    @property
    def kind(self) -> str:
        return self.backing.kind

    @property
    def is_constant(self) -> bool:
        return isinstance(self.backing, ConstantBacking)

    def constant_value(self) -> Optional[np.ndarray]:
        if self.is_constant:
            return self._coerce(self.backing.value(()))
        return None


class MatrixSequence(_LatticeSequence):
    """A(t): an n x n real matrix at every lattice point."""

    def _coerce(self, raw) -> np.ndarray:
        return as_matrix(raw, self.dim)

    @classmethod
    def constant(cls, matrix, arity: int) -> 'MatrixSequence':
        arr = np.atleast_2d(np.asarray(matrix, dtype=float))
        return cls(arity, arr.shape[0], ConstantBacking(as_matrix(arr, arr.shape[0])))

    @classmethod
    def from_rule(cls, rule: Callable[[Point], object], arity: int, dim: int) -> 'MatrixSequence':
        return cls(arity, dim, RuleBacking(rule))

    @classmethod
    def from_table(cls, window: LatticeWindow, values: np.ndarray) -> 'MatrixSequence':
        values = np.asarray(values, dtype=float)
        return cls(window.arity, values.shape[-1], TableBacking(window, values))

    def __repr__(self) -> str:
        return f"MatrixSequence(arity={self.arity}, dim={self.dim}, kind={self.kind})"


class VectorSequence(_LatticeSequence):
    """v(t): a vector of R^n at every lattice point."""

    def _coerce(self, raw) -> np.ndarray:
        return as_vector(raw, self.dim)

    @classmethod
    def constant(cls, vector, arity: int) -> 'VectorSequence':
        arr = np.atleast_1d(np.asarray(vector, dtype=float))
        return cls(arity, arr.shape[0], ConstantBacking(arr))

    @classmethod
    def zeros(cls, arity: int, dim: int) -> 'VectorSequence':
        return cls.constant(np.zeros(dim), arity)

    @classmethod
    def from_rule(cls, rule: Callable[[Point], object], arity: int, dim: int) -> 'VectorSequence':
        return cls(arity, dim, RuleBacking(rule))

    @classmethod
    def from_table(cls, window: LatticeWindow, values: np.ndarray) -> 'VectorSequence':
        values = np.asarray(values, dtype=float)
        if values.ndim == window.arity:
            values = values[..., np.newaxis]
        return cls(window.arity, values.shape[-1], TableBacking(window, values))

    def __repr__(self) -> str:
        return f"VectorSequence(arity={self.arity}, dim={self.dim}, kind={self.kind})"
