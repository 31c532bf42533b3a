"""
First-order linear diagonal recurrences.

Solves x(t + 1) = A(t) x(t) + b(t) on N^m from the hyperplane data f_beta.
At a point t with mu(t) = t^beta = p the solution is the ordered product of
coefficients down the diagonal applied to the boundary value, plus the
accumulated forcing:

    x(t) = A(t-1) A(t-2) ... A(t-p) f_beta(t - p*1 without beta)
           + sum_{k=1..p} A(t-1) ... A(t-(k-1)) b(t - k*1)

The oracle sweeps the defining recurrence directly and is the reference the
closed forms are validated against.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, Optional

import numpy as np

from src.config import get_settings
from src.errors import IncompatibleBoundary
from src.lattice.boundary import BoundaryData, check_compatibility, shell_value
from src.lattice.indices import (
    IndexLike,
    LatticeWindow,
    MultiIndex,
    as_index,
    diag_shift,
    minimizing_betas,
)
from src.lattice.sequences import MatrixSequence, VectorSequence
from src.solvers.grid import SolutionGrid
from src.utils.linalg_helpers import matrix_power


logger = logging.getLogger(__name__)


class FirstOrderProblem:
    """Problem data of x(t + 1) = A(t) x(t) + b(t) with first-layer boundary families."""

    def __init__(self, A: MatrixSequence, b: VectorSequence, boundary: BoundaryData):
        """
        Initialize a first-order problem.

        Args:
            A: Coefficient field (arity m, n x n)
            b: Forcing field (arity m, R^n)
            boundary: Families f_beta on t^beta = 0
        """
        if not (A.arity == b.arity == boundary.arity):
            raise ValueError(
                f"Arity mismatch: A={A.arity}, b={b.arity}, boundary={boundary.arity}"
            )
        if not (A.dim == b.dim == boundary.dim):
            raise ValueError(
                f"Dimension mismatch: A={A.dim}, b={b.dim}, boundary={boundary.dim}"
            )
        self.A = A
        self.b = b
        self.boundary = boundary

    @property
    def arity(self) -> int:
        return self.boundary.arity

    @property
    def dim(self) -> int:
        return self.boundary.dim

    def verify(self, window: LatticeWindow, tol: Optional[float] = None) -> Dict[str, Any]:
        """Compatibility report of the boundary on a full window."""
        return check_compatibility(self.boundary, window, tol)

    def __repr__(self) -> str:
        return f"FirstOrderProblem(arity={self.arity}, dim={self.dim})"


def enclosing_window(t: MultiIndex) -> LatticeWindow:
    """Smallest window (bounds >= 1) containing t."""
    return LatticeWindow(tuple(max(1, c) for c in t.components))


def require_compatible(boundary: BoundaryData, window: LatticeWindow, tol: Optional[float] = None):
    """
    Raise IncompatibleBoundary unless the boundary passes on window.

    Args:
        boundary: Boundary data
        window: Full lattice window
        tol: Comparison tolerance
    """
    report = check_compatibility(boundary, window, tol)
    if not report['pass']:
        raise IncompatibleBoundary(report['reason'], report=report)


def pick_beta(t: MultiIndex, beta: Optional[int] = None) -> int:
    """Validated hyperplane choice at t; the smallest minimizer when beta is None."""
    candidates = minimizing_betas(t)
    if beta is None:
        return candidates[0]
    if beta not in candidates:
        raise ValueError(f"beta={beta} does not attain mu(t) at {t.components}")
    return beta


def _boundary_value(boundary: BoundaryData, t: MultiIndex, beta: int) -> np.ndarray:
    """f_beta at the foot of the diagonal through t."""
    foot = diag_shift(t, -t.coordinate(beta))
    return boundary.value(beta, foot.without(beta))


def _closed_form(problem: FirstOrderProblem, t: MultiIndex, beta: int) -> np.ndarray:
    p = t.coordinate(beta)
    if p == 0:
        return problem.boundary.value(beta, t.without(beta))
    n = problem.dim
    product = np.eye(n)
    forcing = np.zeros(n)
    for k in range(1, p + 1):
        s = diag_shift(t, -k)
        forcing = forcing + product @ problem.b(s)
        product = product @ problem.A(s)
    return product @ _boundary_value(problem.boundary, t, beta) + forcing


def solve_single_time(A: MatrixSequence, b: VectorSequence, x0, t: int) -> np.ndarray:
    """
    Closed-form solution of the single-time recurrence x(s + 1) = A(s) x(s) + b(s).

    Args:
        A: Coefficient sequence of arity 1
        b: Forcing sequence of arity 1
        x0: Initial value x(0)
        t: Time (t >= 0)

    Returns:
        x(t) = A(t-1)...A(0) x0 + b(t-1) + sum_k A(t-1)...A(k+1) b(k)
    """
    if A.arity != 1 or b.arity != 1:
        raise ValueError("Single-time solver needs sequences of arity 1")
    if t < 0:
        raise ValueError(f"Time must be non-negative, got {t}")
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    product = np.eye(A.dim)
    forcing = np.zeros(A.dim)
    for k in range(1, t + 1):
        s = (t - k,)
        forcing = forcing + product @ b(s)
        product = product @ A(s)
    return product @ x0 + forcing


def solve_at(
    problem: FirstOrderProblem,
    t: IndexLike,
    waive_compat: bool = False,
    beta: Optional[int] = None,
    tol: Optional[float] = None
) -> np.ndarray:
    """
    Value x(t) of the unique solution.

    Args:
        problem: First-order problem
        t: Lattice point
        waive_compat: Skip the compatibility check on the box [0, t]
        beta: Hyperplane to use (must attain mu(t)); smallest minimizer by default
        tol: Comparison tolerance for the compatibility check

    Returns:
        x(t) as a length-n array

    Raises:
        IncompatibleBoundary: if the boundary families disagree and the check is not waived
    """
    t = as_index(t)
    if t.arity != problem.arity:
        raise ValueError(f"Point {t.components} does not have arity {problem.arity}")
    if waive_compat:
        logger.debug("Compatibility check waived for solve_at at %s", t.components)
    else:
        require_compatible(problem.boundary, enclosing_window(t), tol)
    return _closed_form(problem, t, pick_beta(t, beta))


def solve_constant_A(
    A,
    b: VectorSequence,
    bd: BoundaryData,
    t: IndexLike,
    waive_compat: bool = False,
    beta: Optional[int] = None,
    tol: Optional[float] = None
) -> np.ndarray:
    """
    Constant-coefficient closed form x(t) = A^p f_beta(...) + sum_{k=1..p} A^(k-1) b(t - k*1).

    Args:
        A: Constant n x n matrix
        b: Forcing sequence
        bd: Boundary families
        t: Lattice point
        waive_compat: Skip the compatibility check
        beta: Hyperplane to use (must attain mu(t))
        tol: Comparison tolerance

    Returns:
        x(t)
    """
    t = as_index(t)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if t.arity != bd.arity:
        raise ValueError(f"Point {t.components} does not have arity {bd.arity}")
    if not waive_compat:
        require_compatible(bd, enclosing_window(t), tol)
    beta = pick_beta(t, beta)
    p = t.coordinate(beta)
    if p == 0:
        return bd.value(beta, t.without(beta))

    leading = matrix_power(A, p) @ _boundary_value(bd, t, beta)
    if b.is_constant and not np.any(b.constant_value()):
        return leading
    forcing = np.zeros(bd.dim)
    power = np.eye(bd.dim)
    for k in range(1, p + 1):
        forcing = forcing + power @ b(diag_shift(t, -k))
        power = power @ A
    return leading + forcing


def oracle_iterate(
    problem: FirstOrderProblem,
    w: LatticeWindow,
    tol: Optional[float] = None
) -> SolutionGrid:
    """
    Brute-force sweep of x(t + 1) = A(t) x(t) + b(t) over a window.

    Points are visited by nondecreasing mu(t), then lexicographically, so the
    diagonal predecessor of every interior point is already known.

    Args:
        problem: First-order problem
        w: Window of arity m
        tol: Tolerance for agreement of hyperplane values on shared faces

    Returns:
        SolutionGrid on w

    Raises:
        IncompatibleBoundary: if hyperplane values conflict on a shared face
    """
    if w.arity != problem.arity:
        raise ValueError(f"Window arity {w.arity} does not match problem arity {problem.arity}")
    tol = get_settings().tolerance if tol is None else tol
    layers = [problem.boundary.first]
    values = np.empty(w.shape + (problem.dim,))
    for t in w.points_by_mu():
        if min(t) == 0:
            values[t] = shell_value(layers, t, tol)
            continue
        prev = tuple(c - 1 for c in t)
        values[t] = problem.A(prev) @ values[prev] + problem.b(prev)
    return SolutionGrid(w, values)


def solve_grid(
    problem: FirstOrderProblem,
    w: LatticeWindow,
    waive_compat: bool = False,
    threads: Optional[int] = None,
    tol: Optional[float] = None
) -> SolutionGrid:
    """
    Closed-form solution evaluated at every point of a window.

    Args:
        problem: First-order problem
        w: Window of arity m
        waive_compat: Skip the compatibility check
        threads: Worker threads (default from MULTITIME_THREADS)
        tol: Comparison tolerance

    Returns:
        SolutionGrid on w
    """
    if w.arity != problem.arity:
        raise ValueError(f"Window arity {w.arity} does not match problem arity {problem.arity}")
    if not waive_compat:
        require_compatible(problem.boundary, w, tol)
    threads = get_settings().threads if threads is None else max(1, int(threads))

    points = list(w.points())

    def evaluate(point):
        t = MultiIndex(point)
        return _closed_form(problem, t, pick_beta(t, None))

    if threads > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(evaluate, points))
    else:
        results = [evaluate(point) for point in points]

    values = np.empty(w.shape + (problem.dim,))
    for point, value in zip(points, results):
        values[point] = value
    logger.debug("Solved %d points on %s with %d thread(s)", len(points), w, threads)
    return SolutionGrid(w, values)


def residual_first_order(problem: FirstOrderProblem, grid: SolutionGrid) -> float:
    """
    Largest |x(t + 1) - A(t) x(t) - b(t)| over interior points of a solved grid.

    Args:
        problem: First-order problem
        grid: Grid produced by one of the solvers

    Returns:
        Maximum absolute residual (0.0 when the window has no interior)
    """
    worst = 0.0
    for t in grid.window.points():
        if min(t) == 0:
            continue
        prev = tuple(c - 1 for c in t)
        r = grid.values[t] - problem.A(prev) @ grid.values[prev] - problem.b(prev)
        worst = max(worst, float(np.max(np.abs(r))))
    return worst


def residual_homogeneous(A, x, w: LatticeWindow) -> float:
    """
    Largest |x(t + 1) - A(t) x(t)| over a window.

    Args:
        A: MatrixSequence or a constant matrix
        x: Callable returning x(t) for points of w
        w: Window of the same arity

    Returns:
        Maximum absolute residual
    """
    if not isinstance(A, MatrixSequence):
        A = MatrixSequence.constant(A, w.arity)
    worst = 0.0
    for t in w.points():
        if min(t) == 0:
            continue
        prev = tuple(c - 1 for c in t)
        r = np.asarray(x(t)) - A(prev) @ np.asarray(x(prev))
        worst = max(worst, float(np.max(np.abs(r))))
    return worst
