"""
End-to-end tests of the multitime command line

Each test calls main() with an argument list and checks the exit code and
the files or stdout it produced.
"""

import numpy as np
import pytest

from multitime import main, parse_matrix
from src.data import read_grid, read_mesh
from src.errors import ProblemFileError
from tests.helpers import GOLDEN_DIR, PROBLEMS_DIR, write_problem


def problem(name: str) -> str:
    return str(PROBLEMS_DIR / name)


class TestSolveCommand:
    """Test cases for 'solve' and 'orderk'."""

    def test_first_order_matches_golden(self, tmp_path):
        """Test the demo problem against the stored grid."""
        out = str(tmp_path / 'x.csv')
        assert main(['solve', problem('first_order.json'), '-o', out]) == 0
        result = read_grid(out)
        golden = read_grid(str(GOLDEN_DIR / 'first_order.csv'))
        assert result.window == golden.window
        assert np.array_equal(result.values, golden.values)

    def test_fibonacci_with_oracle(self, tmp_path):
        """Test the diagonal Fibonacci grid with the oracle comparison."""
        out = str(tmp_path / 'fib.csv')
        assert main(['solve', problem('fibonacci.json'), '-o', out, '--oracle']) == 0
        golden = read_grid(str(GOLDEN_DIR / 'fibonacci.csv'))
        assert np.allclose(read_grid(out).values, golden.values, rtol=0, atol=1e-9)

    def test_stdout_is_csv(self, capsys):
        """Test that '-o -' (the default) writes the table to stdout only."""
        assert main(['solve', problem('first_order.json'), '--window', '1,2']) == 0
        captured = capsys.readouterr()
        lines = captured.out.splitlines()
        assert lines[0] == 't1,t2,x1'
        assert len(lines) == 1 + 2 * 3
        assert 't1,t2' not in captured.err

    @pytest.mark.parametrize('name', ['repeated_root.json', 'trivariate.json'])
    def test_bundled_problems_pass_oracle(self, name, tmp_path):
        """Test the remaining bundled recurrence problems."""
        assert main(['solve', problem(name), '-o', str(tmp_path / 'out.csv'), '--oracle']) == 0

    def test_incompatible_refused(self, tmp_path):
        """Test exit code 3 and no output for inconsistent boundary data."""
        out = tmp_path / 'x.csv'
        assert main(['solve', problem('incompatible.json'), '-o', str(out)]) == 3
        assert not out.exists()

    def test_tribonacci(self, tmp_path):
        """Test the order-3 problem through 'orderk'."""
        out = str(tmp_path / 'trib.csv')
        assert main(['orderk', problem('tribonacci.json'), '-o', out, '--oracle']) == 0
        grid = read_grid(out)
        assert grid[(5, 5)][0] == 4.0
        assert grid[(6, 6)][0] == 7.0

    def test_orderk_rejects_other_kinds(self, tmp_path):
        """Test that 'orderk' only runs order_k problems."""
        assert main(['orderk', problem('first_order.json'), '-o', str(tmp_path / 'x.csv')]) == 2

    def test_malformed_json(self, tmp_path, capsys):
        """Test exit code 2 with a line number for a syntax error."""
        path = tmp_path / 'broken.json'
        path.write_text('{\n  "kind": "first_order",\n  "arity": \n}\n')
        assert main(['solve', str(path)]) == 2
        assert 'line 4' in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        """Test that an unreadable problem file is a parse error."""
        assert main(['solve', str(tmp_path / 'nowhere.json')]) == 2

    def test_unknown_kind(self, tmp_path):
        """Test that an unknown kind is rejected."""
        path = write_problem(tmp_path, 'odd.json', {'kind': 'third_order', 'arity': 2})
        assert main(['solve', path]) == 2


class TestCompatCommand:
    """Test cases for 'compat'."""

    def test_compatible(self):
        """Test exit code 0 on the demo problem."""
        assert main(['compat', problem('first_order.json')]) == 0

    @pytest.mark.parametrize('name', ['incompatible.json', 'corner_mismatch.json'])
    def test_violations_reported(self, name, capsys):
        """Test exit code 1 and a printed violation."""
        assert main(['compat', problem(name)]) == 1
        assert '✗' in capsys.readouterr().err


class TestOracleCommand:
    """Test cases for 'oracle'."""

    def test_self_test(self, tmp_path):
        """Test the randomized self-test with a fixed seed."""
        out = str(tmp_path / 'oracle.csv')
        assert main(['oracle', '--seed', '3', '-o', out]) == 0
        assert read_grid(out).window.arity in (2, 3)

    def test_problem_sweep(self, tmp_path):
        """Test the sweep of a problem file."""
        out = str(tmp_path / 'oracle.csv')
        assert main(['oracle', problem('first_order.json'), '-o', out]) == 0
        golden = read_grid(str(GOLDEN_DIR / 'first_order.csv'))
        assert np.array_equal(read_grid(out).values, golden.values)


class TestPower2Command:
    """Test cases for 'power2'."""

    def test_fibonacci_matrix(self, capsys):
        """Test [[1, 1], [1, 0]]^10 = [[89, 55], [55, 34]]."""
        assert main(['power2', '--matrix', '1,1;1,0', '--k', '10']) == 0
        captured = capsys.readouterr()
        rows = [[float(v) for v in line.split(',')] for line in captured.out.splitlines()]
        assert np.allclose(rows, [[89.0, 55.0], [55.0, 34.0]], rtol=1e-12)
        assert 'distinct_real' in captured.err

    def test_bad_matrix(self):
        """Test that a 3-entry matrix is a parse error."""
        assert main(['power2', '--matrix', '1,2;3', '--k', '2']) == 2
        with pytest.raises(ProblemFileError):
            parse_matrix('1,2,3;4,5,6')

    def test_negative_exponent(self):
        """Test that k < 0 is a parse error."""
        assert main(['power2', '--matrix', '1,0;0,1', '--k', '-1']) == 2


class TestSpecialCommand:
    """Test cases for 'special'."""

    def test_root_construction(self, tmp_path):
        """Test the bundled root construction."""
        out = str(tmp_path / 'special.csv')
        assert main(['special', problem('special.json'), '-o', out]) == 0
        grid = read_grid(out)
        assert grid.dim == 2
        assert np.allclose(grid[(1, 1)], [5.0, 4.0])

    def test_idempotence_failure(self, tmp_path):
        """Test that sum_power with A^2 != A exits with a numeric failure."""
        path = write_problem(tmp_path, 'bad.json', {
            'kind': 'special',
            'arity': 2,
            'dimension': 2,
            'A': [[2, 0], [0, 2]],
            'construction': {'type': 'sum_power', 'x0': [1, 0]},
            'window': [2, 2],
        })
        assert main(['special', path, '-o', str(tmp_path / 'x.csv')]) == 4


class TestSurfaceCommand:
    """Test cases for 'surface'."""

    def test_planar_mesh(self, tmp_path):
        """Test a planar mesh with OBJ export."""
        out = str(tmp_path / 'plane.mesh')
        obj = tmp_path / 'plane.obj'
        assert main(['surface', problem('planar.mesh'), '-o', out, '--export-obj', str(obj)]) == 0
        assert read_mesh(out).M == 4
        assert sum(line.startswith('v ') for line in obj.read_text().splitlines()) == 25

    def test_saddle_problem_file(self, tmp_path, capsys):
        """Test the surface problem file end to end."""
        out = str(tmp_path / 'saddle.mesh')
        assert main(['surface', problem('saddle.json'), '-o', out]) == 0
        assert read_mesh(out).M == 9
        assert 'Final residual' in capsys.readouterr().err

    def test_non_convergence_writes_best_iterate(self, tmp_path):
        """Test exit code 5 and a written mesh when the iteration cap is hit."""
        out = tmp_path / 'saddle.mesh'
        assert main(['surface', problem('saddle.mesh'), '-o', str(out), '--max-iter', '0']) == 5
        assert out.exists()

    def test_bad_damping(self, tmp_path):
        """Test that damping outside (0, 1] is rejected."""
        assert main(['surface', problem('planar.mesh'), '-o', str(tmp_path / 'x.mesh'), '--damping', '2']) == 2
