"""
Order-k vector diagonal recurrences reduced to first order.

    x(t + k*1) = B_0(t) x(t) + B_1(t) x(t + 1) + ... + B_{k-1}(t) x(t + (k-1)*1) + f(t)

The stacked state y(t) = (x(t), x(t + 1), ..., x(t + (k-1)*1)) satisfies
y(t + 1) = A(t) y(t) + b(t) with a block companion matrix A(t), so the
first-order closed form applies. Boundary data is given as k layers: layer j
holds x on every hyperplane t^beta = j.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from src.errors import IncompatibleBoundary, InsufficientLayers
from src.lattice.boundary import BoundaryData, check_shell, shell_value
from src.lattice.indices import IndexLike, LatticeWindow, as_index
from src.lattice.sequences import MatrixSequence, VectorSequence
from src.solvers.grid import SolutionGrid
from src.solvers.linear import (
    FirstOrderProblem,
    enclosing_window,
    solve_at,
    solve_grid,
)


logger = logging.getLogger(__name__)


class OrderKProblem:
    """Coefficients B_0..B_{k-1}, forcing f and k stacked boundary layers."""

    def __init__(
        self,
        coefficients: Sequence[MatrixSequence],
        forcing: VectorSequence,
        layers: Sequence[BoundaryData]
    ):
        """
        Initialize an order-k problem.

        Args:
            coefficients: B_0(t), ..., B_{k-1}(t), all of arity m and size n x n
            forcing: f(t)
            layers: layers[j] holds the families on t^beta = j (first layer of each BoundaryData)

        Raises:
            InsufficientLayers: if fewer than k layers are supplied
        """
        coefficients = tuple(coefficients)
        if len(coefficients) < 2:
            raise ValueError(f"Order-k problems need k >= 2, got {len(coefficients)}")
        self.order = len(coefficients)
        if len(layers) < self.order:
            raise InsufficientLayers(
                f"Order {self.order} recurrence needs {self.order} boundary layers, got {len(layers)}"
            )
        if len(layers) > self.order:
            logger.warning("Ignoring %d boundary layer(s) beyond order %d", len(layers) - self.order, self.order)

        self.arity = forcing.arity
        self.dim = forcing.dim
        for j, B in enumerate(coefficients):
            if B.arity != self.arity or B.dim != self.dim:
                raise ValueError(
                    f"B_{j} has arity {B.arity} and dimension {B.dim}, expected {self.arity} and {self.dim}"
                )
        for j, layer in enumerate(layers):
            if layer.arity != self.arity or layer.dim != self.dim:
                raise ValueError(f"Boundary layer {j} does not match arity {self.arity} and dimension {self.dim}")

        self.coefficients = coefficients
        self.forcing = forcing
        self.layers = tuple(layers[:self.order])

    def layer_families(self) -> List[Sequence[VectorSequence]]:
        """layer_families()[j][beta - 1] is the family on t^beta = j."""
        return [layer.first for layer in self.layers]

    def __repr__(self) -> str:
        return f"OrderKProblem(order={self.order}, arity={self.arity}, dim={self.dim})"


@dataclass
class CompanionSystem:
    """First-order system y(t + 1) = A(t) y(t) + b(t) on the stacked state."""

    order: int
    dim: int
    A: MatrixSequence
    b: VectorSequence

    @property
    def state_dim(self) -> int:
        return self.order * self.dim

    def block(self, matrix: np.ndarray, row: int, col: int) -> np.ndarray:
        """n x n block (row, col) of a stacked matrix."""
        n = self.dim
        return matrix[row * n:(row + 1) * n, col * n:(col + 1) * n]


def companion_matrix(blocks: Sequence[np.ndarray]) -> np.ndarray:
    """
    Block companion matrix with identity superdiagonal and last block row B_0..B_{k-1}.

    Args:
        blocks: The k coefficient matrices, each n x n

    Returns:
        nk x nk matrix
    """
    k = len(blocks)
    n = blocks[0].shape[0]
    A = np.zeros((n * k, n * k))
    for j in range(k - 1):
        A[j * n:(j + 1) * n, (j + 1) * n:(j + 2) * n] = np.eye(n)
    for j, B in enumerate(blocks):
        A[(k - 1) * n:, j * n:(j + 1) * n] = B
    return A


def build_companion(p: OrderKProblem) -> CompanionSystem:
    """
    Reduce an order-k problem to its first-order block companion system.

    Args:
        p: Order-k problem

    Returns:
        CompanionSystem whose state stacks x(t), x(t + 1), ..., x(t + (k-1)*1)
    """
    k, n = p.order, p.dim

    def A_rule(t):
        return companion_matrix([B(t) for B in p.coefficients])

    def stack_forcing(value):
        stacked = np.zeros(n * k)
        stacked[(k - 1) * n:] = value
        return stacked

    if all(B.is_constant for B in p.coefficients):
        A = MatrixSequence.constant(companion_matrix([B.constant_value() for B in p.coefficients]), p.arity)
    else:
        A = MatrixSequence.from_rule(A_rule, p.arity, n * k)

    if p.forcing.is_constant:
        b = VectorSequence.constant(stack_forcing(p.forcing.constant_value()), p.arity)
    else:
        b = VectorSequence.from_rule(lambda t: stack_forcing(p.forcing(t)), p.arity, n * k)
    return CompanionSystem(order=k, dim=n, A=A, b=b)


def stacked_boundary(p: OrderKProblem) -> BoundaryData:
    """
    Boundary of the stacked state on t^beta = 0.

    Block j of the beta-th family at s is layer j's beta-th family at s + j*1,
    which is x(t + j*1) for the point t on t^beta = 0 with reduced argument s.

    Args:
        p: Order-k problem

    Returns:
        First-layer BoundaryData of dimension n*k
    """
    layers = p.layer_families()

    def stacked_family(beta: int) -> VectorSequence:
        def rule(s, beta=beta):
            return np.concatenate([
                layers[j][beta - 1](tuple(c + j for c in s)) for j in range(p.order)
            ])
        return VectorSequence.from_rule(rule, p.arity - 1, p.dim * p.order)

    families = [stacked_family(beta) for beta in range(1, p.arity + 1)]
    return BoundaryData(p.arity, p.dim * p.order, families)


def companion_problem(p: OrderKProblem) -> FirstOrderProblem:
    """First-order problem of the stacked state."""
    system = build_companion(p)
    return FirstOrderProblem(system.A, system.b, stacked_boundary(p))


def validate_layers(p: OrderKProblem, window: LatticeWindow, tol: Optional[float] = None) -> Dict[str, Any]:
    """
    Cross-layer agreement report on a window.

    Every point with mu(t) < k lies on one or more layers t^beta = j; all of
    them must supply the same value.

    Args:
        p: Order-k problem
        window: Full lattice window
        tol: Comparison tolerance

    Returns:
        Report dictionary (check 'SHELL')
    """
    return check_shell(p.layer_families(), window, tol)


def _require_layers(p: OrderKProblem, window: LatticeWindow, tol: Optional[float]):
    report = validate_layers(p, window, tol)
    if not report['pass']:
        raise IncompatibleBoundary(report['reason'], report=report)


def solve_order_k(
    p: OrderKProblem,
    t: IndexLike,
    waive_compat: bool = False,
    tol: Optional[float] = None
) -> np.ndarray:
    """
    Value x(t) through the companion system.

    Args:
        p: Order-k problem
        t: Lattice point
        waive_compat: Skip the layer agreement check on the box [0, t]
        tol: Comparison tolerance

    Returns:
        x(t) as a length-n array

    Raises:
        IncompatibleBoundary: if the layers disagree and the check is not waived
    """
    t = as_index(t)
    if t.arity != p.arity:
        raise ValueError(f"Point {t.components} does not have arity {p.arity}")
    if not waive_compat:
        _require_layers(p, enclosing_window(t), tol)
    y = solve_at(companion_problem(p), t, waive_compat=True)
    return y[:p.dim]


def solve_order_k_grid(
    p: OrderKProblem,
    w: LatticeWindow,
    waive_compat: bool = False,
    threads: Optional[int] = None,
    tol: Optional[float] = None
) -> SolutionGrid:
    """
    x on every point of a window.

    Args:
        p: Order-k problem
        w: Window of arity m
        waive_compat: Skip the layer agreement check
        threads: Worker threads for the stacked solve
        tol: Comparison tolerance

    Returns:
        SolutionGrid of dimension n
    """
    stacked = solve_companion_grid(p, w, waive_compat, threads, tol)
    return SolutionGrid(w, stacked.values[..., :p.dim])


def solve_companion_grid(
    p: OrderKProblem,
    w: LatticeWindow,
    waive_compat: bool = False,
    threads: Optional[int] = None,
    tol: Optional[float] = None
) -> SolutionGrid:
    """Stacked state y on a window (dimension n*k)."""
    if not waive_compat:
        _require_layers(p, w, tol)
    return solve_grid(companion_problem(p), w, waive_compat=True, threads=threads)


def oracle_order_k(p: OrderKProblem, w: LatticeWindow, tol: Optional[float] = None) -> SolutionGrid:
    """
    Sweep the order-k relation over a window by increasing mu(t).

    Points with mu(t) < k take their boundary value; the rest use
    x(t) = sum_j B_j(t - k*1) x(t - (k-j)*1) + f(t - k*1).

    Args:
        p: Order-k problem
        w: Window of arity m
        tol: Agreement tolerance for the boundary layers

    Returns:
        SolutionGrid on w

    Raises:
        IncompatibleBoundary: if two layers disagree at a shell point
    """
    if w.arity != p.arity:
        raise ValueError(f"Window arity {w.arity} does not match problem arity {p.arity}")
    k = p.order
    layers = p.layer_families()
    values = np.empty(w.shape + (p.dim,))
    for t in w.points_by_mu():
        if min(t) < k:
            values[t] = shell_value(layers, t, tol)
            continue
        base = tuple(c - k for c in t)
        x = p.forcing(base).copy()
        for j, B in enumerate(p.coefficients):
            x = x + B(base) @ values[tuple(c + j for c in base)]
        values[t] = x
    return SolutionGrid(w, values)


def residual_order_k(p: OrderKProblem, grid: SolutionGrid) -> float:
    """Largest |x(t + k*1) - sum_j B_j(t) x(t + j*1) - f(t)| over a solved grid."""
    k = p.order
    worst = 0.0
    for t in grid.window.points():
        if min(t) < k:
            continue
        base = tuple(c - k for c in t)
        r = grid.values[t] - p.forcing(base)
        for j, B in enumerate(p.coefficients):
            r = r - B(base) @ grid.values[tuple(c + j for c in base)]
        worst = max(worst, float(np.max(np.abs(r))))
    return worst


def from_second_order(a: float, b: float, boundary: BoundaryData) -> OrderKProblem:
    """
    The scalar second-order recurrence x(t + 2*1) + a x(t + 1) + b x(t) = 0 as an order-2 problem.

    Args:
        a: Coefficient of x(t + 1)
        b: Coefficient of x(t)
        boundary: Two-layer scalar boundary data

    Returns:
        OrderKProblem with B_0 = -b, B_1 = -a and f = 0
    """
    if not boundary.has_second_layer:
        raise InsufficientLayers("Second-order data needs the t^beta = 1 layer")
    m = boundary.arity
    coefficients = [MatrixSequence.constant([[-b]], m), MatrixSequence.constant([[-a]], m)]
    layers = [
        BoundaryData(m, 1, boundary.first),
        BoundaryData(m, 1, boundary.second),
    ]
    return OrderKProblem(coefficients, VectorSequence.zeros(m, 1), layers)
