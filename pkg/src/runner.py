"""
Recurrence Runner - Main Orchestrator

Coordinates problem loading, the boundary compatibility check, the closed-form
solvers and the consistency monitor for every problem kind.

Usage:
    runner = RecurrenceRunner()
    spec = load_problem('problems/fibonacci.json')
    results = runner.solve(spec)

    if results['accept']:
        write_grid(results['grid'], 'out.csv')
"""

import logging
from typing import Any, Callable, Dict, Optional

import numpy as np

from src.config import get_settings
from src.data.mesh_io import read_mesh
from src.data.problem_loader import (
    ProblemSpec,
    build_first_order,
    build_order_k,
    build_second_order,
    special_settings,
    surface_settings,
)
from src.errors import IncompatibleBoundary, MultitimeError
from src.lattice.boundary import BoundaryData, check_compatibility
from src.lattice.indices import LatticeWindow
from src.lattice.sequences import MatrixSequence, VectorSequence
from src.monitors import ConsistencyMonitor
from src.solvers import (
    FirstOrderProblem,
    OrderKProblem,
    SecondOrderProblem,
    SolutionGrid,
    oracle_iterate,
    oracle_order_k,
    oracle_second_order,
    residual_first_order,
    residual_homogeneous,
    residual_order_k,
    residual_second_order,
    solve_grid,
    solve_order_k_grid,
    solve_second_order_grid,
    validate_layers,
)
from src.special import (
    eigen_mode_value,
    epsilon_power_solution,
    fit_modes,
    general_mode_solution,
    matrix_mth_root,
    root_solution,
    sum_power_solution,
)
from src.structure import diagonal_extension
from src.surface import MetricField, NewtonOptions, newton_solve


logger = logging.getLogger(__name__)

DEFAULT_BOUND = 4


class RecurrenceRunner:
    """
    Runs one problem file end to end.

    Every solve goes through the same steps: resolve the window and tolerance,
    check compatibility, evaluate the closed form, then cross-check.
    """

    def __init__(
        self,
        tol: Optional[float] = None,
        threads: Optional[int] = None,
        waive_compat: bool = False
    ):
        """
        Initialize the runner.

        Args:
            tol: Comparison tolerance (default: file options, then settings)
            threads: Worker threads for grid evaluation (default from settings)
            waive_compat: Skip the compatibility refusal (a warning is logged instead)
        """
        settings = get_settings()
        self.tol = tol
        self.threads = settings.threads if threads is None else threads
        self.waive_compat = waive_compat
        self.settings = settings

    def resolve_tol(self, spec: Optional[ProblemSpec] = None) -> float:
        """Command line beats file options, which beat the environment."""
        if self.tol is not None:
            return self.tol
        if spec is not None and 'tol' in spec.options:
            return float(spec.options['tol'])
        return self.settings.tolerance

    def resolve_window(self, spec: ProblemSpec, window: Optional[LatticeWindow] = None) -> LatticeWindow:
        if window is not None:
            if window.arity != spec.arity:
                raise ValueError(f"Window {window} does not have arity {spec.arity}")
            return window
        if spec.window is not None:
            return spec.window
        return LatticeWindow.cube(DEFAULT_BOUND, spec.arity)

    def build(self, spec: ProblemSpec):
        """Domain problem object for a recurrence problem file."""
        builders: Dict[str, Callable[[ProblemSpec], Any]] = {
            'first_order': build_first_order,
            'second_order': build_second_order,
            'order_k': build_order_k,
        }
        if spec.kind not in builders:
            raise ValueError(f"Kind '{spec.kind}' has no recurrence problem object")
        return builders[spec.kind](spec)

    def check(self, spec: ProblemSpec, window: Optional[LatticeWindow] = None) -> Dict[str, Any]:
        """
        Compatibility report for a problem file.

        First- and second-order problems use the hyperplane intersection
        conditions; order-k problems use cross-layer agreement.

        Returns:
            Report dictionary with pass, violations, details, reason and check
        """
        window = self.resolve_window(spec, window)
        return self.compatibility(self.build(spec), window, self.resolve_tol(spec))

    @staticmethod
    def compatibility(problem, window: LatticeWindow, tol: float) -> Dict[str, Any]:
        if isinstance(problem, OrderKProblem):
            return validate_layers(problem, window, tol)
        return check_compatibility(problem.boundary, window, tol)

    def solve(
        self,
        spec: ProblemSpec,
        window: Optional[LatticeWindow] = None,
        oracle: bool = False
    ) -> Dict[str, Any]:
        """
        Solve a recurrence problem on a window.

        Args:
            spec: Parsed problem file
            window: Override of the file's window
            oracle: Also run the brute-force sweep and compare

        Returns:
            Dictionary containing:
                - grid: SolutionGrid of the closed form
                - window: Window used
                - compatibility: Compatibility report
                - oracle: Oracle grid (or None)
                - consistency: ConsistencyMonitor report
                - accept: False if any consistency check fired

        Raises:
            IncompatibleBoundary: if the check fails and is not waived
        """
        window = self.resolve_window(spec, window)
        tol = self.resolve_tol(spec)
        problem = self.build(spec)

        # STEP 1: Compatibility
        compatibility = self.compatibility(problem, window, tol)
        if not compatibility['pass']:
            if not self.waive_compat:
                raise IncompatibleBoundary(compatibility['reason'], report=compatibility)
            logger.warning("Compatibility waived: %s", compatibility['reason'])

        # STEP 2: Closed form
        waive = True  # already checked above
        if isinstance(problem, FirstOrderProblem):
            grid = solve_grid(problem, window, waive_compat=waive, threads=self.threads, tol=tol)
        elif isinstance(problem, SecondOrderProblem):
            grid = solve_second_order_grid(problem, window, waive_compat=waive, tol=tol)
        else:
            grid = solve_order_k_grid(problem, window, waive_compat=waive, threads=self.threads, tol=tol)
        logger.info("Solved %s problem on %s (%d points)", spec.kind, window, window.size)

        # STEP 3: Cross-checks
        oracle_grid = self.oracle(problem, window, tol) if oracle else None
        consistency = self.monitor(problem, grid, oracle_grid, tol)

        return {
            'kind': spec.kind,
            'grid': grid,
            'window': window,
            'compatibility': compatibility,
            'oracle': oracle_grid,
            'consistency': consistency,
            'accept': consistency['accept'],
        }

    def oracle(self, problem, window: LatticeWindow, tol: Optional[float] = None) -> SolutionGrid:
        """Brute-force sweep matching the problem's type."""
        if isinstance(problem, FirstOrderProblem):
            return oracle_iterate(problem, window, tol)
        if isinstance(problem, SecondOrderProblem):
            return oracle_second_order(problem, window, tol)
        return oracle_order_k(problem, window, tol)

    def monitor(
        self,
        problem,
        grid: SolutionGrid,
        oracle_grid: Optional[SolutionGrid],
        tol: float
    ) -> Dict[str, Any]:
        """Consistency report of a solved grid."""
        monitor = ConsistencyMonitor(oracle_tol=tol, residual_tol=self.residual_tol(grid, tol))
        if isinstance(problem, FirstOrderProblem):
            residual = residual_first_order(problem, grid)
            boundary, relation = problem.boundary, 'x(t+1) = A(t)x(t) + b(t)'
        elif isinstance(problem, SecondOrderProblem):
            residual = residual_second_order(problem, grid)
            boundary, relation = problem.boundary, 'x(t+2) + a x(t+1) + b x(t) = 0'
        else:
            residual = residual_order_k(problem, grid)
            boundary, relation = None, f'order-{problem.order} recurrence'
        return monitor.run_all_checks(grid, oracle_grid, residual, boundary, relation)

    @staticmethod
    def residual_tol(grid: SolutionGrid, tol: float) -> float:
        # Residuals scale with the magnitude of the solution.
        return tol * max(1.0, float(np.max(np.abs(grid.values), initial=0.0)))

    def solve_special(self, spec: ProblemSpec, window: Optional[LatticeWindow] = None) -> Dict[str, Any]:
        """
        Evaluate a special-solution construction on a window.

        Returns:
            Dictionary with grid, window, construction type, residual of
            x(t + 1) = A x(t) and the consistency report
        """
        window = self.resolve_window(spec, window)
        tol = self.resolve_tol(spec)
        settings = special_settings(spec)
        evaluate = special_evaluator(settings, spec.arity, tol)

        values = np.empty(window.shape + (spec.dimension,))
        for t in window.points():
            value = evaluate(t)
            if np.iscomplexobj(value):
                raise MultitimeError(f"Construction is complex-valued at {t}")
            values[t] = value
        grid = SolutionGrid(window, values)

        residual = residual_homogeneous(settings['A'], grid.__getitem__, window)
        monitor = ConsistencyMonitor(oracle_tol=tol, residual_tol=self.residual_tol(grid, tol))
        consistency = monitor.run_all_checks(grid, residual=residual, relation='x(t+1) = A x(t)')
        return {
            'kind': spec.kind,
            'construction': settings['type'],
            'grid': grid,
            'window': window,
            'residual': residual,
            'consistency': consistency,
            'accept': consistency['accept'],
        }

    def solve_surface(
        self,
        spec_or_path,
        metric: Optional[str] = None,
        options: Optional[Dict[str, Any]] = None,
        from_mesh: Optional[bool] = None
    ):
        """
        Run the Newton integrator on a mesh file or a surface problem file.

        Args:
            spec_or_path: ProblemSpec of kind 'surface' or a mesh path
            metric: Metric name (overrides the problem file)
            options: NewtonOptions fields (override the problem file)
            from_mesh: Start from the mesh interior instead of transfinite interpolation

        Returns:
            (grid, report) from newton_solve
        """
        file_options: Dict[str, Any] = {}
        file_metric = 'euclidean'
        if isinstance(spec_or_path, ProblemSpec):
            settings = surface_settings(spec_or_path)
            path, file_metric, file_options = settings['mesh'], settings['metric'], dict(settings['options'])
        else:
            path = spec_or_path

        merged = {**file_options, **(options or {})}
        file_from_mesh = bool(merged.pop('from_mesh', False))
        start_from_mesh = file_from_mesh if from_mesh is None else from_mesh
        unknown = set(merged) - set(NewtonOptions.__dataclass_fields__)
        if unknown:
            raise ValueError(f"Unknown surface option(s): {', '.join(sorted(unknown))}")
        grid = read_mesh(path)
        field = MetricField.by_name(metric or file_metric, grid.dim)
        opts = NewtonOptions(**merged)
        logger.info("Surface solve on %r with %s metric", grid, field.name)
        return newton_solve(grid, field, opts, from_mesh=start_from_mesh)

    def self_test(self, seed: int = 0, window: Optional[LatticeWindow] = None) -> Dict[str, Any]:
        """
        Randomized closed form vs oracle comparison for all three recurrence kinds.

        Args:
            seed: Random seed
            window: Window (default: 4-cube of the drawn arity)

        Returns:
            Dictionary with per-kind consistency reports, the first-order
            oracle grid and an overall accept flag
        """
        rng = np.random.default_rng(seed)
        tol = self.tol if self.tol is not None else self.settings.tolerance
        arity = window.arity if window is not None else int(rng.integers(2, 4))
        window = window or LatticeWindow.cube(DEFAULT_BOUND, arity)

        problems = {
            'first_order': random_first_order(rng, arity, int(rng.integers(1, 4))),
            'second_order': random_second_order(rng, arity),
            'order_k': random_order_k(rng, arity, 3, int(rng.integers(1, 3))),
        }

        results = {}
        grids = {}
        for kind, problem in problems.items():
            if isinstance(problem, FirstOrderProblem):
                grid = solve_grid(problem, window, threads=self.threads, tol=tol)
            elif isinstance(problem, SecondOrderProblem):
                grid = solve_second_order_grid(problem, window, tol=tol)
            else:
                grid = solve_order_k_grid(problem, window, threads=self.threads, tol=tol)
            oracle_grid = self.oracle(problem, window, tol)
            grids[kind] = oracle_grid
            results[kind] = self.monitor(problem, grid, oracle_grid, tol)
            logger.debug("Self-test %s: %s", kind, results[kind]['status'])

        return {
            'seed': seed,
            'window': window,
            'checks': results,
            'oracle': grids['first_order'],
            'accept': all(r['accept'] for r in results.values()),
        }


def special_evaluator(settings: Dict[str, Any], arity: int, tol: float) -> Callable:
    """
    Point evaluator for a validated special-solution construction.

    Args:
        settings: Output of special_settings()
        arity: Lattice arity
        tol: Tolerance for the power identity and imaginary parts

    Returns:
        Callable t -> x(t)
    """
    A = settings['A']
    kind = settings['type']
    if kind == 'sum_power':
        return lambda t: sum_power_solution(A, settings['x0'], t, tol)
    if kind == 'root':
        B = matrix_mth_root(A, arity)
        return lambda t: root_solution(B, arity, settings['x0'], t)
    if kind == 'epsilon_power':
        return lambda t: epsilon_power_solution(A, settings['epsilon'], settings['x0'], t)
    if kind == 'eigen_modes':
        solution = fit_modes(A, settings['alpha'], settings['h'], arity)
        return lambda t: eigen_mode_value(solution, t, tol)
    y = diagonal_extension(settings['boundary'])
    return lambda t: general_mode_solution(A, y, t, tol)


def random_full_sequence(
    rng: np.random.Generator,
    arity: int,
    dim: int,
    terms: int = 3,
    max_power: int = 2
) -> Callable:
    """
    Integer polynomial x: N^m -> R^n with small random coefficients.

    Restricting it to the hyperplanes gives compatible boundary data.
    """
    coefficients = rng.integers(-2, 3, size=(dim, terms))
    powers = rng.integers(0, max_power + 1, size=(dim, terms, arity))

    def x(t):
        point = np.asarray(t, dtype=float)
        return np.array([
            sum(coefficients[i, k] * np.prod(point ** powers[i, k]) for k in range(terms))
            for i in range(dim)
        ])

    return x


def random_coefficient_field(rng: np.random.Generator, arity: int, dim: int, scale: float = 1.0) -> MatrixSequence:
    """A(t) = A0 + A1 * cos(t^1 + ... + t^m) with entries drawn from U[-scale, scale]."""
    A0 = rng.uniform(-scale, scale, size=(dim, dim))
    A1 = rng.uniform(-scale, scale, size=(dim, dim)) / 2.0
    return MatrixSequence.from_rule(lambda t: A0 + A1 * np.cos(sum(t)), arity, dim)


def random_first_order(rng: np.random.Generator, arity: int, dim: int) -> FirstOrderProblem:
    """First-order problem with varying A, varying b and compatible polynomial boundary."""
    A = random_coefficient_field(rng, arity, dim)
    b0 = rng.uniform(-1, 1, size=dim)
    b = VectorSequence.from_rule(lambda t: b0 * (1 + min(t)), arity, dim)
    boundary = BoundaryData.from_full_sequence(random_full_sequence(rng, arity, dim), arity, dim)
    return FirstOrderProblem(A, b, boundary)


def random_second_order(rng: np.random.Generator, arity: int) -> SecondOrderProblem:
    """Scalar second-order problem with a, b in U[-1, 1] and two compatible layers."""
    a, b = rng.uniform(-1, 1, size=2)
    boundary = BoundaryData.from_full_sequence(random_full_sequence(rng, arity, 1), arity, 1, layers=2)
    return SecondOrderProblem(float(a), float(b), boundary)


def random_order_k(rng: np.random.Generator, arity: int, order: int, dim: int) -> OrderKProblem:
    """Order-k problem with constant coefficients and layers restricted from one full sequence."""
    coefficients = [
        MatrixSequence.constant(rng.uniform(-0.5, 0.5, size=(dim, dim)), arity) for _ in range(order)
    ]
    f0 = rng.uniform(-1, 1, size=dim)
    forcing = VectorSequence.constant(f0, arity)
    full = random_full_sequence(rng, arity, dim)
    layers = [BoundaryData.from_full_sequence(full, arity, dim, level=j) for j in range(order)]
    return OrderKProblem(coefficients, forcing, layers)
