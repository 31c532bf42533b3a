"""
Multitime lattice arithmetic.

A MultiIndex is a point t = (t^1, ..., t^m) of N^m. Hyperplane indices beta
are 1-based throughout the public API, matching the usual t^beta notation.
"""

from dataclasses import dataclass
from itertools import product
from typing import Iterator, List, Sequence, Tuple, Union

from src.errors import NegativeIndex


@dataclass(frozen=True)
class MultiIndex:
    """A lattice point of N^m."""

    components: Tuple[int, ...]

    def __post_init__(self):
        comps = tuple(int(c) for c in self.components)
        if len(comps) < 1:
            raise ValueError("A MultiIndex needs at least one component")
        if any(c < 0 for c in comps):
            raise NegativeIndex(f"Negative lattice coordinate in {comps}")
        object.__setattr__(self, 'components', comps)

    @classmethod
    def of(cls, *components: int) -> 'MultiIndex':
        return cls(tuple(components))

    @property
    def arity(self) -> int:
        return len(self.components)

    def __iter__(self) -> Iterator[int]:
        return iter(self.components)

    def __len__(self) -> int:
        return len(self.components)

    def __getitem__(self, position: int) -> int:
        return self.components[position]

    def coordinate(self, beta: int) -> int:
        """Component t^beta (1-based)."""
        return self.components[beta - 1]

    def without(self, beta: int) -> Tuple[int, ...]:
        """The (m-1)-tuple with t^beta removed (argument of the beta-th family)."""
        return self.components[:beta - 1] + self.components[beta:]

    def __repr__(self) -> str:
        return f"MultiIndex{self.components}"


IndexLike = Union[MultiIndex, Sequence[int]]


def as_index(t: IndexLike) -> MultiIndex:
    """Accept a MultiIndex or any integer sequence."""
    if isinstance(t, MultiIndex):
        return t
    return MultiIndex(tuple(t))


def insert_coordinate(reduced: Sequence[int], beta: int, value: int) -> Tuple[int, ...]:
    """
    Rebuild a full point from a hyperplane argument tuple.

    Args:
        reduced: (m-1)-tuple without coordinate beta
        beta: 1-based position to insert at
        value: Value of t^beta

    Returns:
        Full m-tuple
    """
    reduced = tuple(reduced)
    return reduced[:beta - 1] + (int(value),) + reduced[beta - 1:]


def mu(t: IndexLike) -> int:
    """
    Minimum component of t, the diagonal distance to the nearest hyperplane.

    Args:
        t: Lattice point

    Returns:
        min over the components of t
    """
    return min(as_index(t).components)


def diag_shift(t: IndexLike, k: int) -> MultiIndex:
    """
    Shift t by k along the main diagonal: t + k * (1, ..., 1).

    Args:
        t: Lattice point
        k: Integer shift (may be negative)

    Returns:
        Shifted MultiIndex

    Raises:
        NegativeIndex: if any resulting component is negative
    """
    t = as_index(t)
    shifted = tuple(c + k for c in t.components)
    if any(c < 0 for c in shifted):
        raise NegativeIndex(f"Diagonal shift of {t.components} by {k} leaves N^m")
    return MultiIndex(shifted)


def minimizing_betas(t: IndexLike) -> List[int]:
    """All 1-based beta with t^beta = mu(t), in increasing order."""
    t = as_index(t)
    low = min(t.components)
    return [beta for beta, c in enumerate(t.components, start=1) if c == low]


def argmin_beta(t: IndexLike) -> int:
    """
    Hyperplane used by the closed forms at t.

    Ties are broken towards the smallest index; compatible boundary data
    makes the choice immaterial.

    Args:
        t: Lattice point

    Returns:
        Smallest 1-based beta with t^beta = mu(t)
    """
    return minimizing_betas(t)[0]


@dataclass(frozen=True)
class LatticeWindow:
    """The closed box [0, T^1] x ... x [0, T^m] anchored at the origin."""

    bounds: Tuple[int, ...]

    def __post_init__(self):
        bounds = tuple(int(b) for b in self.bounds)
        if len(bounds) < 1:
            raise ValueError("A window needs at least one bound")
        if any(b < 1 for b in bounds):
            raise ValueError(f"Window bounds must be >= 1, got {bounds}")
        object.__setattr__(self, 'bounds', bounds)

    @classmethod
    def cube(cls, bound: int, arity: int) -> 'LatticeWindow':
        return cls((bound,) * arity)

    @property
    def arity(self) -> int:
        return len(self.bounds)

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(b + 1 for b in self.bounds)

    @property
    def size(self) -> int:
        count = 1
        for extent in self.shape:
            count *= extent
        return count

    def contains(self, t: IndexLike) -> bool:
        comps = tuple(as_index(t).components) if not isinstance(t, tuple) else t
        if len(comps) != self.arity:
            return False
        return all(0 <= c <= b for c, b in zip(comps, self.bounds))

    def points(self) -> Iterator[Tuple[int, ...]]:
        """All points in lexicographic order."""
        return product(*(range(b + 1) for b in self.bounds))

    def points_by_mu(self) -> List[Tuple[int, ...]]:
        """All points ordered by nondecreasing mu(t), then lexicographically."""
        return sorted(self.points(), key=lambda p: (min(p), p))

    def without(self, beta: int) -> 'LatticeWindow':
        """Window of the beta-th hyperplane family's arguments."""
        if self.arity < 2:
            raise ValueError("A one-dimensional window has no hyperplane window")
        return LatticeWindow(self.bounds[:beta - 1] + self.bounds[beta:])

    def __repr__(self) -> str:
        return f"LatticeWindow{self.bounds}"
