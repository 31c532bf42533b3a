"""
Unit Tests for the discrete area functional and the Newton integrator
"""

import numpy as np
import pytest

from src.data import export_obj, load_problem, read_mesh, write_mesh
from src.errors import DegenerateCell, NonConvergence, OutOfRange, ProblemFileError
from src.runner import RecurrenceRunner
from src.surface import (
    MetricField,
    NewtonOptions,
    assemble_jacobian,
    cell_geometry,
    centroid,
    degenerate_cells,
    el_residual,
    newton_solve,
    planar_grid,
    residual_field,
    saddle_grid,
    total_area,
)
from tests.helpers import PROBLEMS_DIR, create_noisy_grid


def random_rotation(seed: int, dim: int = 3) -> np.ndarray:
    """Random orthogonal matrix from the QR factorization of a Gaussian matrix."""
    Q, R = np.linalg.qr(np.random.default_rng(seed).normal(size=(dim, dim)))
    return Q * np.sign(np.diag(R))


def moved_grid(grid, Q, shift=None):
    """Apply x -> Q x + shift to every node."""
    nodes = grid.nodes @ Q.T
    if shift is not None:
        nodes = nodes + shift
    return grid.with_nodes(nodes)


def finite_difference_gradient(grid, metric, i, j, step=1e-6):
    """Central difference of total_area / (h1 h2) with respect to node (i, j)."""
    gradient = np.zeros(grid.dim)
    for k in range(grid.dim):
        plus = grid.nodes.copy()
        minus = grid.nodes.copy()
        plus[i, j, k] += step
        minus[i, j, k] -= step
        difference = total_area(grid.with_nodes(plus), metric) - total_area(grid.with_nodes(minus), metric)
        gradient[k] = difference / (2.0 * step * grid.h1 * grid.h2)
    return gradient


@pytest.fixture
def converged_saddle():
    grid = read_mesh(str(PROBLEMS_DIR / 'saddle.mesh'))
    return newton_solve(grid, MetricField.euclidean(3), NewtonOptions(tol=1e-10, max_iter=50))


class TestMetricField:
    """Test cases for ambient metrics."""

    @pytest.mark.parametrize('name', ['euclidean', 'demo-curved'])
    def test_builtin_metrics_validate(self, name):
        """Test symmetry, positivity and derivatives of the bundled metrics."""
        points = np.random.default_rng(0).uniform(-1, 1, size=(10, 3))
        report = MetricField.by_name(name).validate(points)
        assert report['pass'] is True
        assert report['details']['points'] == 10

    def test_indefinite_metric_fails(self):
        """Test that an indefinite g is reported."""
        bad = MetricField(2, lambda x: np.diag([1.0, -1.0]), lambda x: np.zeros((2, 2, 2)), name='bad')
        report = bad.validate([[0.0, 0.0]])
        assert report['pass'] is False
        assert report['details']['not_positive_definite'] == 1

    def test_unknown_metric_name(self):
        """Test that only the two built-in names are accepted."""
        with pytest.raises(ValueError):
            MetricField.by_name('hyperbolic')


class TestCellGeometry:
    """Test cases for the centroid-rule discretization."""

    def test_unit_cell_of_plane(self):
        """Test H = I and L = 1 on a unit planar grid."""
        cell = cell_geometry(planar_grid(3, 3), MetricField.euclidean(3), 1, 1)
        assert np.allclose(cell.metric, np.eye(2))
        assert cell.lagrangian == pytest.approx(1.0)
        assert np.allclose(cell.centroid, [4.0 / 3.0, 4.0 / 3.0, 0.0])

    def test_planar_area(self):
        """Test that the discrete action of a planar unit square is 1."""
        grid = planar_grid(4, 4, 0.25, 0.25)
        assert total_area(grid, MetricField.euclidean(3)) == pytest.approx(1.0)

    def test_degenerate_cell(self):
        """Test that a collapsed edge is reported unless clamped."""
        grid = planar_grid(3, 3)
        nodes = grid.nodes.copy()
        nodes[1, 0] = nodes[0, 0]
        collapsed = grid.with_nodes(nodes)
        with pytest.raises(DegenerateCell):
            cell_geometry(collapsed, MetricField.euclidean(3), 0, 0)
        assert cell_geometry(collapsed, MetricField.euclidean(3), 0, 0, clamp=True).degenerate

    def test_out_of_range(self):
        """Test cell and node bounds."""
        grid = planar_grid(3, 3)
        with pytest.raises(OutOfRange):
            centroid(grid, 3, 0)
        with pytest.raises(OutOfRange):
            el_residual(grid, MetricField.euclidean(3), 0, 1)


class TestEulerLagrangeResidual:
    """Test cases for the discrete Euler-Lagrange residual."""

    @pytest.mark.parametrize('name', ['euclidean', 'demo-curved'])
    @pytest.mark.parametrize('seed', [0, 1, 2])
    def test_residual_is_gradient_of_area(self, name, seed):
        """Test the analytic residual against central differences of the area."""
        grid = create_noisy_grid(seed)
        metric = MetricField.by_name(name)
        for i, j in grid.interior_nodes():
            analytic = el_residual(grid, metric, i, j)
            numeric = finite_difference_gradient(grid, metric, i, j)
            assert np.max(np.abs(analytic - numeric)) <= 1e-6 * max(1.0, float(np.max(np.abs(analytic))))

    def test_residual_field_matches_nodewise(self):
        """Test that the cell-by-cell assembly equals the nodewise residual."""
        grid = create_noisy_grid(5)
        metric = MetricField.demo_curved(3)
        field = residual_field(grid, metric)
        for i, j in grid.interior_nodes():
            assert np.allclose(field[i, j], el_residual(grid, metric, i, j), atol=1e-12)
        assert not np.any(field[0, :])

    def test_jacobian_shape(self):
        """Test one row and column per interior coordinate."""
        grid = create_noisy_grid(1, M=4, N=5)
        J = assemble_jacobian(grid, MetricField.euclidean(3))
        assert J.shape == (3 * 4 * 3, 3 * 4 * 3)


class TestRigidMotionAndScaling:
    """Test cases for how the discrete action reacts to moving the whole grid."""

    @pytest.mark.parametrize('seed', [0, 1, 2, 3])
    def test_residual_follows_rigid_motion(self, seed):
        """Test el_residual(Q g + c) = Q el_residual(g) for the Euclidean metric."""
        grid = create_noisy_grid(seed)
        metric = MetricField.euclidean(3)
        Q = random_rotation(seed)
        shift = np.random.default_rng(seed + 100).uniform(-2.0, 2.0, size=3)
        moved = moved_grid(grid, Q, shift)
        for i, j in grid.interior_nodes():
            expected = Q @ el_residual(grid, metric, i, j)
            assert np.allclose(el_residual(moved, metric, i, j), expected, rtol=0, atol=1e-9)

    def test_curved_residual_follows_rotation_about_origin(self):
        """Test that |x|^2-based metric is equivariant under rotations without translation."""
        grid = create_noisy_grid(7)
        metric = MetricField.demo_curved(3)
        Q = random_rotation(7)
        moved = moved_grid(grid, Q)
        for i, j in grid.interior_nodes():
            expected = Q @ el_residual(grid, metric, i, j)
            assert np.allclose(el_residual(moved, metric, i, j), expected, rtol=0, atol=1e-9)

    @pytest.mark.parametrize('name', ['euclidean', 'demo-curved'])
    def test_area_unchanged_by_rotation(self, name):
        """Test that total_area does not see a rotation about the origin."""
        grid = create_noisy_grid(4)
        metric = MetricField.by_name(name)
        for seed in range(5):
            rotated = moved_grid(grid, random_rotation(seed))
            assert total_area(rotated, metric) == pytest.approx(total_area(grid, metric), rel=1e-12)

    @pytest.mark.parametrize('s', [0.5, 2.0, 3.7])
    def test_scaling(self, s):
        """Test that L_d scales by s^2 and the residual by s (Euclidean)."""
        grid = create_noisy_grid(2)
        metric = MetricField.euclidean(3)
        scaled = grid.with_nodes(s * grid.nodes)
        assert total_area(scaled, metric) == pytest.approx(s * s * total_area(grid, metric), rel=1e-12)
        for i in range(grid.M):
            for j in range(grid.N):
                L = cell_geometry(grid, metric, i, j).lagrangian
                assert cell_geometry(scaled, metric, i, j).lagrangian == pytest.approx(s * s * L, rel=1e-12)
        for i, j in grid.interior_nodes():
            expected = s * el_residual(grid, metric, i, j)
            assert np.allclose(el_residual(scaled, metric, i, j), expected, rtol=1e-10, atol=1e-12)


class TestNewtonSolve:
    """Test cases for the Newton integrator."""

    def test_plane_is_already_minimal(self):
        """Test that a planar grid converges with no iterations."""
        grid, report = newton_solve(read_mesh(str(PROBLEMS_DIR / 'planar.mesh')), MetricField.euclidean(3))
        assert report['converged'] is True
        assert report['iterations'] == 0
        assert report['final_residual'] <= 1e-12
        assert np.allclose(grid.nodes, planar_grid(4, 4).nodes)

    def test_saddle_converges(self, converged_saddle):
        """Test the 9x9 saddle boundary converges and lowers the area."""
        grid, report = converged_saddle
        assert report['converged'] is True
        assert report['iterations'] <= 50
        assert report['final_residual'] <= 1e-10
        assert report['final_area'] < report['initial_area']
        assert np.allclose(grid.nodes[0], saddle_grid().nodes[0], atol=1e-12)

    def test_saddle_is_a_local_minimum(self, converged_saddle):
        """Test that small vertical bumps of interior nodes do not lower the area."""
        grid, _ = converged_saddle
        metric = MetricField.euclidean(3)
        area = total_area(grid, metric)
        rng = np.random.default_rng(11)
        for _ in range(100):
            nodes = grid.nodes.copy()
            i, j = rng.integers(1, 9, size=2)
            nodes[i, j, 2] += rng.choice([-1.0, 1.0]) * 1e-3
            assert total_area(grid.with_nodes(nodes), metric) >= area - 1e-12

    def test_history_never_increases(self, converged_saddle):
        """Test that every accepted step keeps or lowers the residual."""
        _, report = converged_saddle
        history = report['history']
        assert len(history) == report['iterations'] + 1
        assert all(later <= earlier for earlier, later in zip(history, history[1:]))
        assert all(0 < step <= 1.0 for step in report['steps'])

    @pytest.mark.parametrize('source', ['planar.mesh', 'saddle.mesh', 'saddle.json'])
    def test_bundled_surfaces_do_not_gain_area(self, source):
        """Test that Newton never ends with more area than it started with."""
        runner = RecurrenceRunner()
        if source.endswith('.json'):
            _, report = runner.solve_surface(load_problem(str(PROBLEMS_DIR / source)))
        else:
            _, report = runner.solve_surface(str(PROBLEMS_DIR / source))
        assert report['converged'] is True
        if report['iterations'] > 0:
            assert report['final_area'] < report['initial_area']
        else:
            assert report['final_area'] == pytest.approx(report['initial_area'], abs=1e-12)

    def test_no_warnings_on_regular_grid(self, converged_saddle):
        """Test that a healthy run records no degenerate cells."""
        _, report = converged_saddle
        assert report['warnings'] == []

    def test_degenerate_start_is_recorded(self):
        """Test that clamped cells of an iterate show up in the report."""
        grid = planar_grid(4, 4)
        nodes = grid.nodes.copy()
        nodes[2, 2] += [0.0, 0.0, 0.5]
        nodes[1, 2] = nodes[1, 1]
        collapsed = grid.with_nodes(nodes)
        assert (1, 1) in degenerate_cells(collapsed, MetricField.euclidean(3))

        with pytest.raises(NonConvergence) as info:
            newton_solve(collapsed, MetricField.euclidean(3), NewtonOptions(max_iter=0), from_mesh=True)
        warnings = info.value.report['warnings']
        assert len(warnings) == 1
        assert warnings[0].startswith('Iteration 0')

    def test_zero_iterations_raises_with_best_grid(self):
        """Test that max_iter = 0 on a non-minimal start gives NonConvergence."""
        with pytest.raises(NonConvergence) as info:
            newton_solve(saddle_grid(), MetricField.euclidean(3), NewtonOptions(max_iter=0))
        assert info.value.grid is not None
        assert info.value.report['converged'] is False
        assert info.value.exit_code == 5

    def test_metric_dimension_must_match(self):
        """Test that a 2D metric cannot drive a 3D grid."""
        with pytest.raises(ValueError):
            newton_solve(planar_grid(3, 3), MetricField.euclidean(2))

    @pytest.mark.parametrize('options', [{'tol': 0.0}, {'max_iter': -1}, {'damping': 1.5}])
    def test_invalid_options(self, options):
        """Test option validation."""
        with pytest.raises(ValueError):
            NewtonOptions(**options)


class TestMeshFiles:
    """Test cases for mesh input and OBJ output."""

    def test_bundled_saddle_mesh(self):
        """Test that the bundled mesh holds the saddle boundary."""
        grid = read_mesh(str(PROBLEMS_DIR / 'saddle.mesh'))
        assert (grid.M, grid.N) == (9, 9)
        assert np.allclose(grid.nodes, saddle_grid().nodes, atol=1e-12)

    def test_write_then_read(self, tmp_path):
        """Test that written meshes are read back exactly."""
        grid = create_noisy_grid(3)
        path = str(tmp_path / 'noisy.mesh')
        write_mesh(grid, path)
        again = read_mesh(path)
        assert np.array_equal(again.nodes, grid.nodes)
        assert (again.h1, again.h2) == (grid.h1, grid.h2)

    def test_bad_header(self, tmp_path):
        """Test that a short header is a parse error."""
        path = tmp_path / 'bad.mesh'
        path.write_text("4 4 1\n0 0 0\n")
        with pytest.raises(ProblemFileError):
            read_mesh(str(path))

    def test_obj_counts(self, tmp_path):
        """Test one vertex per node and two faces per cell."""
        path = tmp_path / 'plane.obj'
        export_obj(planar_grid(4, 4), str(path))
        lines = path.read_text().splitlines()
        assert sum(line.startswith('v ') for line in lines) == 25
        assert sum(line.startswith('f ') for line in lines) == 32

    def test_obj_pads_planar_grids(self, tmp_path):
        """Test that n = 2 vertices get z = 0 and n = 4 is refused."""
        path = tmp_path / 'flat.obj'
        export_obj(planar_grid(2, 2, dim=2), str(path))
        vertices = [line for line in path.read_text().splitlines() if line.startswith('v ')]
        assert all(line.split()[3] == '0' for line in vertices)
        with pytest.raises(ValueError):
            export_obj(planar_grid(2, 2, dim=4), str(tmp_path / 'four.obj'))
