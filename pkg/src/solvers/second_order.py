"""
Second-order scalar diagonal recurrences.

    x(t + 2*1) + a x(t + 1) + b x(t) = 0

Along each diagonal the recurrence is a linear second-order scalar recurrence
with companion matrix [[0, 1], [-b, -a]], so x at distance p from the
hyperplane t^beta = 0 is c0(p) f_beta + c1(p) g_beta where
A^p = c1(p) A + c0(p) I. The coefficients c0, c1 have closed forms in the
eigenvalues of A, one per spectral class.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np

from src.config import get_settings
from src.lattice.boundary import BoundaryData, check_compatibility, shell_value
from src.lattice.indices import IndexLike, LatticeWindow, as_index, diag_shift
from src.solvers.grid import SolutionGrid
from src.solvers.linear import enclosing_window, pick_beta, require_compatible


logger = logging.getLogger(__name__)

DISTINCT_REAL = 'distinct_real'
REPEATED = 'repeated'
COMPLEX = 'complex'


@dataclass(frozen=True)
class Eigen2:
    """Spectral data of a real 2 x 2 matrix."""

    trace: float
    determinant: float
    case: str
    lambda1: float = 0.0
    lambda2: float = 0.0
    r: float = 0.0
    theta: float = 0.0

    @classmethod
    def distinct_real(cls, trace: float, determinant: float, lambda1: float, lambda2: float) -> 'Eigen2':
        if lambda1 == lambda2:
            raise ValueError("Distinct real eigenvalues must differ")
        return cls(trace, determinant, DISTINCT_REAL, lambda1=lambda1, lambda2=lambda2)

    @classmethod
    def repeated(cls, trace: float, determinant: float, lambda1: float) -> 'Eigen2':
        return cls(trace, determinant, REPEATED, lambda1=lambda1, lambda2=lambda1)

    @classmethod
    def complex_pair(cls, trace: float, determinant: float, r: float, theta: float) -> 'Eigen2':
        if r <= 0 or math.sin(theta) == 0.0:
            raise ValueError(f"Complex eigenvalues need r > 0 and sin(theta) != 0, got r={r}, theta={theta}")
        return cls(trace, determinant, COMPLEX, r=r, theta=theta)

    @property
    def discriminant(self) -> float:
        return self.trace ** 2 - 4.0 * self.determinant


def classify_eigen(A, tol: Optional[float] = None) -> Eigen2:
    """
    Classify the eigenvalues of a 2 x 2 matrix as distinct real, repeated or complex.

    Args:
        A: 2 x 2 matrix
        tol: Relative band for the repeated case; |disc| <= tol * max(1, Tr^2, |det|)

    Returns:
        Eigen2
    """
    A = np.asarray(A, dtype=float)
    if A.shape != (2, 2):
        raise ValueError(f"Expected a 2x2 matrix, got shape {A.shape}")
    tol = get_settings().classification_tol if tol is None else tol

    trace = float(A[0, 0] + A[1, 1])
    det = float(A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0])
    disc = trace * trace - 4.0 * det
    band = tol * max(1.0, trace * trace, abs(det))

    if abs(disc) <= band:
        return Eigen2.repeated(trace, det, trace / 2.0)
    if disc > 0:
        root = math.sqrt(disc)
        return Eigen2.distinct_real(trace, det, (trace + root) / 2.0, (trace - root) / 2.0)
    theta = math.atan2(math.sqrt(-disc) / 2.0, trace / 2.0)
    return Eigen2.complex_pair(trace, det, math.sqrt(det), theta)


def power_coefficients(eigen: Eigen2, k: int) -> Tuple[float, float]:
    """
    Coefficients (c1, c0) with A^k = c1 A + c0 I.

    Args:
        eigen: Spectral data of A (any case can be forced by constructing it directly)
        k: Exponent (k >= 0)

    Returns:
        (c1(k), c0(k))
    """
    if k < 0:
        raise ValueError(f"Exponent must be non-negative, got {k}")
    if k == 0:
        return 0.0, 1.0

    if eigen.case == DISTINCT_REAL:
        l1, l2 = eigen.lambda1, eigen.lambda2
        p1, p2 = l1 ** k, l2 ** k
        return (p1 - p2) / (l1 - l2), (l1 * p2 - l2 * p1) / (l1 - l2)

    if eigen.case == REPEATED:
        lam = eigen.lambda1
        return k * lam ** (k - 1), -(k - 1) * lam ** k

    r, theta = eigen.r, eigen.theta
    s = math.sin(theta)
    return r ** (k - 1) * math.sin(k * theta) / s, -(r ** k) * math.sin((k - 1) * theta) / s


def matrix_power_2x2(A, k: int, tol: Optional[float] = None) -> np.ndarray:
    """
    A^k for a 2 x 2 matrix from its spectral closed form.

    Args:
        A: 2 x 2 matrix
        k: Exponent (k >= 0)
        tol: Classification band (see classify_eigen)

    Returns:
        c1(k) A + c0(k) I
    """
    A = np.asarray(A, dtype=float)
    c1, c0 = power_coefficients(classify_eigen(A, tol), k)
    return c1 * A + c0 * np.eye(2)


class SecondOrderProblem:
    """x(t + 2*1) + a x(t + 1) + b x(t) = 0 with data on t^beta = 0 and t^beta = 1."""

    def __init__(self, a: float, b: float, boundary: BoundaryData):
        """
        Initialize a second-order problem.

        Args:
            a: Coefficient of x(t + 1)
            b: Coefficient of x(t)
            boundary: Scalar boundary data with both layers (f_beta and g_beta)
        """
        if not boundary.has_second_layer:
            raise ValueError("Second-order problems need boundary data on t^beta = 1 as well")
        if boundary.dim != 1:
            raise ValueError(f"Second-order problems are scalar, got dimension {boundary.dim}")
        self.a = float(a)
        self.b = float(b)
        self.boundary = boundary

    @property
    def arity(self) -> int:
        return self.boundary.arity

    def companion(self) -> np.ndarray:
        """Matrix advancing (x(t), x(t + 1)) one diagonal step."""
        return np.array([[0.0, 1.0], [-self.b, -self.a]])

    def eigen(self, tol: Optional[float] = None) -> Eigen2:
        """Spectral class of the characteristic polynomial lambda^2 + a lambda + b."""
        return classify_eigen(self.companion(), tol)

    def verify(self, window: LatticeWindow, tol: Optional[float] = None) -> Dict[str, Any]:
        return check_compatibility(self.boundary, window, tol)

    def __repr__(self) -> str:
        return f"SecondOrderProblem(a={self.a}, b={self.b}, arity={self.arity})"


def solve_second_order(
    p: SecondOrderProblem,
    t: IndexLike,
    waive_compat: bool = False,
    beta: Optional[int] = None,
    tol: Optional[float] = None
) -> float:
    """
    Closed-form value x(t).

    Args:
        p: Second-order problem
        t: Lattice point
        waive_compat: Skip the compatibility check on the box [0, t]
        beta: Hyperplane to use (must attain mu(t))
        tol: Comparison tolerance

    Returns:
        x(t)

    Raises:
        IncompatibleBoundary: if the boundary fails the check and it is not waived
    """
    t = as_index(t)
    if t.arity != p.arity:
        raise ValueError(f"Point {t.components} does not have arity {p.arity}")
    if not waive_compat:
        require_compatible(p.boundary, enclosing_window(t), tol)

    beta = pick_beta(t, beta)
    depth = t.coordinate(beta)
    if depth == 0:
        return float(p.boundary.value(beta, t.without(beta))[0])
    if depth == 1:
        return float(p.boundary.value(beta, t.without(beta), layer=1)[0])

    f = p.boundary.value(beta, diag_shift(t, -depth).without(beta))[0]
    g = p.boundary.value(beta, diag_shift(t, -(depth - 1)).without(beta), layer=1)[0]
    c1, c0 = power_coefficients(p.eigen(), depth)
    return float(c1 * g + c0 * f)


def oracle_second_order(
    p: SecondOrderProblem,
    w: LatticeWindow,
    tol: Optional[float] = None
) -> SolutionGrid:
    """
    Sweep x(t) = -a x(t - 1) - b x(t - 2*1) over a window by increasing mu(t).

    Points with mu(t) <= 1 take the boundary value; every layer through such a
    point must supply the same value.

    Args:
        p: Second-order problem
        w: Window of arity m
        tol: Agreement tolerance for the boundary layers

    Returns:
        SolutionGrid on w (n = 1)

    Raises:
        IncompatibleBoundary: if two layers disagree at a point
    """
    if w.arity != p.arity:
        raise ValueError(f"Window arity {w.arity} does not match problem arity {p.arity}")
    layers = [p.boundary.first, p.boundary.second]
    values = np.empty(w.shape + (1,))
    for t in w.points_by_mu():
        if min(t) < 2:
            values[t] = shell_value(layers, t, tol)
            continue
        t1 = tuple(c - 1 for c in t)
        t2 = tuple(c - 2 for c in t)
        values[t] = -p.a * values[t1] - p.b * values[t2]
    return SolutionGrid(w, values)


def residual_second_order(p: SecondOrderProblem, grid: SolutionGrid) -> float:
    """Largest |x(t + 2*1) + a x(t + 1) + b x(t)| over a solved grid."""
    worst = 0.0
    for t in grid.window.points():
        if min(t) < 2:
            continue
        t1 = tuple(c - 1 for c in t)
        t2 = tuple(c - 2 for c in t)
        r = grid.values[t] + p.a * grid.values[t1] + p.b * grid.values[t2]
        worst = max(worst, float(np.max(np.abs(r))))
    return worst


def solve_second_order_grid(
    p: SecondOrderProblem,
    w: LatticeWindow,
    waive_compat: bool = False,
    tol: Optional[float] = None
) -> SolutionGrid:
    """Closed form evaluated on every point of a window."""
    if not waive_compat:
        require_compatible(p.boundary, w, tol)
    values = np.empty(w.shape + (1,))
    for t in w.points():
        values[t] = solve_second_order(p, t, waive_compat=True)
    return SolutionGrid(w, values)
