"""
Example Usage: Multitime Recurrence Toolkit

This script walks through the library API on the bundled problem files:
a first-order recurrence, a diagonal Fibonacci problem, the psi
construction of homogeneous solutions and a minimal surface solve.

Run with: python example_usage.py
"""

import os

import numpy as np
from dotenv import load_dotenv

from src.data import grid_to_csv, load_problem
from src.lattice import LatticeWindow, MatrixSequence
from src.runner import RecurrenceRunner
from src.solvers import classify_eigen, matrix_power_2x2
from src.structure import make_yk_generator, psi_apply

# Load environment variables from .env file (MULTITIME_TOL and friends)
load_dotenv()

PROBLEMS = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'problems')


def main():
    """Main example execution."""

    print("=" * 80)
    print("MULTITIME RECURRENCE TOOLKIT - EXAMPLE USAGE")
    print("=" * 80)
    print()

    runner = RecurrenceRunner()

    # --------------------------------------------------
    # STEP 1: First-order recurrence from a problem file
    # --------------------------------------------------
    print("STEP 1: Solving x(t + 1) = 2 x(t) + 1 on [0,3]^2")
    print("-" * 80)

    spec = load_problem(os.path.join(PROBLEMS, 'first_order.json'))
    results = runner.solve(spec, oracle=True)
    print(grid_to_csv(results['grid']))
    print(f"Compatible: {results['compatibility']['pass']}")
    print(f"Oracle deviation: {results['grid'].max_deviation(results['oracle']):.3e}")
    print(f"Accepted: {results['accept']}")
    print()

    # --------------------------------------------------
    # STEP 2: Second order and the 2x2 power formula
    # --------------------------------------------------
    print("STEP 2: Diagonal Fibonacci numbers")
    print("-" * 80)

    spec = load_problem(os.path.join(PROBLEMS, 'fibonacci.json'))
    grid = runner.solve(spec)['grid']
    print(f"x(4, 4) = {grid[(4, 4)][0]:.12g}")
    print(f"x(4, 2) = {grid[(4, 2)][0]:.12g}")

    A = np.array([[1.0, 1.0], [1.0, 0.0]])
    print(f"Spectral class of {A.tolist()}: {classify_eigen(A).case}")
    print(f"A^10 =\n{matrix_power_2x2(A, 10)}")
    print()

    # --------------------------------------------------
    # STEP 3: Homogeneous solutions from diagonal-constant data
    # --------------------------------------------------
    print("STEP 3: psi(y_2) for a rotation-like coefficient field")
    print("-" * 80)

    field = MatrixSequence.from_rule(
        lambda t: np.array([[np.cos(t[0]), -0.5], [0.5, np.cos(t[1])]]), 2, 2
    )
    y = make_yk_generator(2, [1.0, 0.0])
    for t in LatticeWindow((2, 2)).points():
        print(f"  t={t}  y={y(t)}  psi(y)={psi_apply(field, y, t)}")
    print()

    # --------------------------------------------------
    # STEP 4: Minimal surface spanning a saddle boundary
    # --------------------------------------------------
    print("STEP 4: Newton solve on the 9x9 saddle")
    print("-" * 80)

    surface, report = runner.solve_surface(load_problem(os.path.join(PROBLEMS, 'saddle.json')))
    print(f"Converged:       {report['converged']} in {report['iterations']} iteration(s)")
    print(f"Final residual:  {report['final_residual']:.3e}")
    print(f"Area:            {report['initial_area']:.10f} -> {report['final_area']:.10f}")
    print(f"Center node:     {surface.node(4, 4)}")
    print()

    print("=" * 80)
    print("EXAMPLE COMPLETE")
    print("=" * 80)


if __name__ == "__main__":
    main()
