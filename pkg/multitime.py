#!/usr/bin/env python3
"""
Multitime Recurrence Toolkit

Solves diagonal multitime recurrences in closed form, cross-checks them
against brute-force sweeps, and integrates discrete minimal surfaces.

Usage:
    python multitime.py solve problems/first_order.json -o out.csv --oracle
    python multitime.py compat problems/incompatible.json
    python multitime.py oracle -o - --seed 7
    python multitime.py power2 --matrix "0,1;-1,1" --k 6
    python multitime.py orderk problems/tribonacci.json -o out.csv
    python multitime.py special problems/special.json -o out.csv
    python multitime.py surface problems/saddle.mesh -o smooth.mesh --export-obj smooth.obj

Exit codes: 0 ok, 1 check failed, 2 parse, 3 incompatible boundary,
4 numeric, 5 non-convergence.
"""

import argparse
import logging
import sys
from typing import Any, Dict, List, Optional

import numpy as np
from dotenv import load_dotenv

from src.data import export_obj, load_problem, parse_window, write_grid, write_mesh
from src.errors import (
    EXIT_CHECK_FAILED,
    EXIT_NUMERIC,
    EXIT_OK,
    EXIT_PARSE,
    MultitimeError,
    NonConvergence,
    ProblemFileError,
)
from src.runner import RecurrenceRunner
from src.solvers import classify_eigen, matrix_power_2x2


logger = logging.getLogger('multitime')

RECURRENCE_KINDS = ('first_order', 'second_order', 'order_k')


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """Parse command-line arguments."""
    parser = argparse.ArgumentParser(
        description='Multitime diagonal recurrences and discrete minimal surfaces',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s solve problems/fibonacci.json -o - --oracle
  %(prog)s compat problems/incompatible.json
  %(prog)s power2 --matrix "2,1;1,2" --k 10
  %(prog)s surface problems/saddle.mesh -o out.mesh --metric demo-curved
        """
    )
    parser.add_argument('--verbose', '-v', action='store_true', help='Debug logging on stderr')
    commands = parser.add_subparsers(dest='command', required=True)

    def recurrence_command(name: str, help_text: str) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, help=help_text)
        sub.add_argument('problem', help='Problem file (JSON)')
        sub.add_argument('-o', '--output', default='-', help="Output CSV ('-' for stdout, default)")
        sub.add_argument('--window', help='Window bounds T1,T2,... (overrides the file)')
        sub.add_argument('--tol', type=float, help='Comparison tolerance (overrides file and environment)')
        return sub

    solve = recurrence_command('solve', 'Closed-form solution on a window')
    solve.add_argument('--oracle', action='store_true', help='Also run the brute-force sweep and compare')
    solve.add_argument('--no-compat', action='store_true', help='Waive the compatibility refusal')

    compat = commands.add_parser('compat', help='Check boundary compatibility only')
    compat.add_argument('problem', help='Problem file (JSON)')
    compat.add_argument('--window', help='Window bounds T1,T2,...')
    compat.add_argument('--tol', type=float, help='Comparison tolerance')

    oracle = commands.add_parser('oracle', help='Brute-force sweep, or a seeded self-test without a problem')
    oracle.add_argument('problem', nargs='?', help='Problem file (JSON); omit for the randomized self-test')
    oracle.add_argument('-o', '--output', default='-', help="Output CSV of the oracle grid ('-' for stdout)")
    oracle.add_argument('--seed', type=int, default=0, help='Seed of the randomized self-test (default 0)')
    oracle.add_argument('--window', help='Window bounds T1,T2,...')
    oracle.add_argument('--tol', type=float, help='Comparison tolerance')

    power2 = commands.add_parser('power2', help='k-th power of a 2x2 matrix via its spectral class')
    power2.add_argument('--matrix', required=True, help='Matrix as "a,b;c,d"')
    power2.add_argument('--k', type=int, required=True, help='Non-negative exponent')
    power2.add_argument('--tol', type=float, help='Classification tolerance')

    orderk = recurrence_command('orderk', 'Order-k problem through its companion system')
    orderk.add_argument('--oracle', action='store_true', help='Also run the order-k sweep and compare')
    orderk.add_argument('--no-compat', action='store_true', help='Waive the layer agreement refusal')

    recurrence_command('special', 'Evaluate a special-solution construction')

    surface = commands.add_parser('surface', help='Newton integrator for a discrete minimal surface')
    surface.add_argument('mesh', help='Mesh file, or a surface problem file (.json)')
    surface.add_argument('-o', '--output', required=True, help='Output mesh path')
    surface.add_argument('--metric', choices=['euclidean', 'demo-curved'], help='Ambient metric')
    surface.add_argument('--tol', type=float, help='Residual tolerance (default 1e-10)')
    surface.add_argument('--max-iter', type=int, help='Iteration cap (default 50)')
    surface.add_argument('--damping', type=float, help='Initial Newton step in (0, 1] (default 1)')
    surface.add_argument('--export-obj', help='Also write a Wavefront OBJ')
    surface.add_argument('--from-mesh', action='store_true', help='Start from the mesh interior instead of interpolating')

    return parser.parse_args(argv)


def print_header(title: str):
    """Print a section header to stderr."""
    print("\n" + "=" * 60, file=sys.stderr)
    print(title, file=sys.stderr)
    print("=" * 60, file=sys.stderr)


def print_compatibility(report: Dict[str, Any]):
    """Print a compatibility report with its full violation list."""
    details = report['details']
    if report['pass']:
        print(f"  ✓ Compatible ({details['points_checked']} point(s) checked)", file=sys.stderr)
        return
    print(f"  ✗ {report['reason']}", file=sys.stderr)
    for violation in report['violations']:
        print(
            f"    t={violation['point']}  {violation['condition']} "
            f"(alpha={violation['alpha']}, beta={violation['beta']})  "
            f"{np.array2string(np.asarray(violation['left']))} != {np.array2string(np.asarray(violation['right']))}",
            file=sys.stderr,
        )


def print_consistency(report: Dict[str, Any]):
    """Print the consistency monitor's checks and alerts."""
    for name, check in report['checks'].items():
        mark = '✗' if check['triggered'] else '✓'
        details = ', '.join(
            f"{key}={value:.3e}" if isinstance(value, float) else f"{key}={value}"
            for key, value in check['details'].items()
            if not isinstance(value, list)
        )
        print(f"  {mark} {name}: {details}", file=sys.stderr)
    for alert in report['alerts']:
        print(f"  ⚠ [{alert['severity']}] {alert['message']}", file=sys.stderr)


def print_surface_report(report: Dict[str, Any]):
    """Print Newton iteration summary."""
    print(f"  Metric:            {report['metric']}", file=sys.stderr)
    print(f"  Iterations:        {report['iterations']}", file=sys.stderr)
    print(f"  Initial residual:  {report['initial_residual']:.3e}", file=sys.stderr)
    print(f"  Final residual:    {report['final_residual']:.3e}", file=sys.stderr)
    print(f"  Initial area:      {report['initial_area']:.12g}", file=sys.stderr)
    if report.get('final_area') is not None:
        print(f"  Final area:        {report['final_area']:.12g}", file=sys.stderr)
    for warning in report.get('warnings', []):
        print(f"  ⚠ {warning}", file=sys.stderr)
    if report.get('reason'):
        print(f"  ✗ {report['reason']}", file=sys.stderr)


def _window(args: argparse.Namespace, spec) -> Optional[Any]:
    if getattr(args, 'window', None) is None:
        return None
    return parse_window(args.window, spec.arity)


def _require_kind(spec, kinds, command: str):
    if spec.kind not in kinds:
        raise ProblemFileError(
            f"'{command}' expects kind {' or '.join(kinds)}, got '{spec.kind}'",
            line=spec.line_of('kind'),
        )


def cmd_solve(args: argparse.Namespace, kinds=RECURRENCE_KINDS) -> int:
    spec = load_problem(args.problem)
    _require_kind(spec, kinds, args.command)
    runner = RecurrenceRunner(tol=args.tol, waive_compat=args.no_compat)
    results = runner.solve(spec, _window(args, spec), oracle=args.oracle)
    write_grid(results['grid'], args.output)

    print_header(f"{spec.kind} on {results['window']}")
    print_compatibility(results['compatibility'])
    if results['oracle'] is not None:
        deviation = results['grid'].max_deviation(results['oracle'])
        print(f"  Max abs deviation from oracle: {deviation:.3e}", file=sys.stderr)
    print_consistency(results['consistency'])
    return EXIT_OK if results['accept'] else EXIT_CHECK_FAILED


def cmd_orderk(args: argparse.Namespace) -> int:
    return cmd_solve(args, kinds=('order_k',))


def cmd_compat(args: argparse.Namespace) -> int:
    spec = load_problem(args.problem)
    _require_kind(spec, RECURRENCE_KINDS, 'compat')
    runner = RecurrenceRunner(tol=args.tol)
    report = runner.check(spec, _window(args, spec))
    print_header(f"Compatibility of {args.problem}")
    print_compatibility(report)
    return EXIT_OK if report['pass'] else EXIT_CHECK_FAILED


def cmd_oracle(args: argparse.Namespace) -> int:
    runner = RecurrenceRunner(tol=args.tol)
    if args.problem is None:
        window = parse_window(args.window, len(args.window.split(','))) if args.window else None
        results = runner.self_test(seed=args.seed, window=window)
        write_grid(results['oracle'], args.output)
        print_header(f"Self-test (seed {args.seed}) on {results['window']}")
        for kind, report in results['checks'].items():
            print(f"{kind}: {report['status']}", file=sys.stderr)
            print_consistency(report)
        return EXIT_OK if results['accept'] else EXIT_CHECK_FAILED

    spec = load_problem(args.problem)
    _require_kind(spec, RECURRENCE_KINDS, 'oracle')
    runner.waive_compat = True
    results = runner.solve(spec, _window(args, spec), oracle=True)
    write_grid(results['oracle'], args.output)
    print_header(f"Oracle sweep of {args.problem}")
    print_consistency(results['consistency'])
    return EXIT_OK if results['accept'] else EXIT_CHECK_FAILED


def parse_matrix(text: str) -> np.ndarray:
    """Parse "a,b;c,d" into a 2x2 array."""
    try:
        rows = [[float(v) for v in row.split(',')] for row in text.split(';')]
        matrix = np.array(rows, dtype=float)
    except ValueError as exc:
        raise ProblemFileError(f"--matrix expects 'a,b;c,d', got {text!r}") from exc
    if matrix.shape != (2, 2):
        raise ProblemFileError(f"--matrix expects a 2x2 matrix, got shape {matrix.shape}")
    return matrix


def cmd_power2(args: argparse.Namespace) -> int:
    A = parse_matrix(args.matrix)
    if args.k < 0:
        raise ProblemFileError(f"--k must be non-negative, got {args.k}")
    eigen = classify_eigen(A, args.tol)
    result = matrix_power_2x2(A, args.k, args.tol)
    for row in result:
        sys.stdout.write(','.join(f"{v:.17g}" for v in row) + '\n')
    print(f"  Spectral class: {eigen.case} (trace {eigen.trace:.6g}, det {eigen.determinant:.6g})", file=sys.stderr)
    return EXIT_OK


def cmd_special(args: argparse.Namespace) -> int:
    spec = load_problem(args.problem)
    _require_kind(spec, ('special',), 'special')
    runner = RecurrenceRunner(tol=args.tol)
    results = runner.solve_special(spec, _window(args, spec))
    write_grid(results['grid'], args.output)
    print_header(f"{results['construction']} on {results['window']}")
    print_consistency(results['consistency'])
    return EXIT_OK if results['accept'] else EXIT_CHECK_FAILED


def cmd_surface(args: argparse.Namespace) -> int:
    source = args.mesh
    if source.endswith('.json'):
        source = load_problem(source)
        _require_kind(source, ('surface',), 'surface')

    options = {}
    if args.tol is not None:
        options['tol'] = args.tol
    if args.max_iter is not None:
        options['max_iter'] = args.max_iter
    if args.damping is not None:
        options['damping'] = args.damping

    runner = RecurrenceRunner()
    try:
        grid, report = runner.solve_surface(
            source, metric=args.metric, options=options, from_mesh=args.from_mesh or None
        )
    except NonConvergence as exc:
        # Best iterate is still written
        if exc.grid is not None:
            write_mesh(exc.grid, args.output)
            if args.export_obj:
                export_obj(exc.grid, args.export_obj)
        print_header("Surface solve (not converged)")
        print_surface_report(exc.report)
        raise

    write_mesh(grid, args.output)
    if args.export_obj:
        export_obj(grid, args.export_obj)
    print_header("Surface solve")
    print_surface_report(report)
    return EXIT_OK


COMMANDS = {
    'solve': cmd_solve,
    'compat': cmd_compat,
    'oracle': cmd_oracle,
    'power2': cmd_power2,
    'orderk': cmd_orderk,
    'special': cmd_special,
    'surface': cmd_surface,
}


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run one subcommand.

    Args:
        argv: Argument list (default sys.argv[1:])

    Returns:
        Process exit code
    """
    # Load environment variables
    load_dotenv()

    args = parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format='%(levelname)s %(name)s: %(message)s',
        stream=sys.stderr,
        force=True,
    )

    try:
        return COMMANDS[args.command](args)
    except MultitimeError as e:
        print(f"❌ {type(e).__name__}: {e}", file=sys.stderr)
        return e.exit_code
    except np.linalg.LinAlgError as e:
        print(f"❌ Numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as e:
        print(f"❌ Invalid input: {e}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == '__main__':
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        print("\n\n⚠ Interrupted by user", file=sys.stderr)
        sys.exit(1)
