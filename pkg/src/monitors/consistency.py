"""
Consistency Monitor

Checks a solved grid against independent evidence before it is trusted:

CHECK 1: ORACLE DEVIATION
- Closed-form grid vs brute-force sweep of the defining recurrence
- Max relative deviation above tolerance
Action: Reject the closed-form result

CHECK 2: RECURRENCE RESIDUAL
- The defining relation evaluated on the solved grid
Action: Reject the result

CHECK 3: BOUNDARY RESTRICTION
- The solved grid restricted to each hyperplane layer must reproduce the
  boundary data it was built from
Action: Reject the result
"""

from enum import Enum
from typing import Any, Dict, Optional

from src.config import get_settings
from src.errors import OutOfWindow
from src.lattice.boundary import BoundaryData
from src.solvers.grid import SolutionGrid
from src.utils.linalg_helpers import values_close


class OracleCheck(Enum):
    """Enumeration of consistency checks."""
    ORACLE_DEVIATION = "ORACLE_DEVIATION"
    RECURRENCE_RESIDUAL = "RECURRENCE_RESIDUAL"
    BOUNDARY_RESTRICTION = "BOUNDARY_RESTRICTION"


class ConsistencyMonitor:
    """Cross-checks solved grids and reports inconsistencies."""

    def __init__(
        self,
        oracle_tol: Optional[float] = None,
        residual_tol: Optional[float] = None
    ):
        """
        Initialize the Consistency Monitor.

        Args:
            oracle_tol: Max relative deviation from the oracle (default from settings)
            residual_tol: Max absolute recurrence residual (default from settings)
        """
        tol = get_settings().tolerance
        self.oracle_tol = tol if oracle_tol is None else oracle_tol
        self.residual_tol = tol if residual_tol is None else residual_tol

    def check_oracle_deviation(self, solved: SolutionGrid, oracle: SolutionGrid) -> Dict[str, Any]:
        """
        Check 1: closed form against the oracle sweep.

        Args:
            solved: Grid from a closed-form solver
            oracle: Grid from the matching oracle on the same window

        Returns:
            Dictionary with check status and details
        """
        relative = solved.max_relative_deviation(oracle)
        absolute = solved.max_deviation(oracle)
        triggered = relative > self.oracle_tol

        message = None
        if triggered:
            message = (
                f"ORACLE DEVIATION: closed form differs from iteration by {relative:.3e} "
                f"(relative, tolerance {self.oracle_tol:.1e})"
            )

        return {
            'check': OracleCheck.ORACLE_DEVIATION,
            'triggered': triggered,
            'severity': 'CRITICAL',
            'action': 'REJECT CLOSED-FORM RESULT',
            'details': {
                'max_relative_deviation': relative,
                'max_abs_deviation': absolute,
                'points': solved.window.size,
            },
            'message': message
        }

    def check_residual(self, residual: float, relation: str = 'recurrence') -> Dict[str, Any]:
        """
        Check 2: residual of the defining relation.

        Args:
            residual: Max absolute residual computed by one of the residual_* functions
            relation: Label for messages

        Returns:
            Dictionary with check status and details
        """
        triggered = residual > self.residual_tol
        message = None
        if triggered:
            message = f"RECURRENCE RESIDUAL: {relation} violated by {residual:.3e}"

        return {
            'check': OracleCheck.RECURRENCE_RESIDUAL,
            'triggered': triggered,
            'severity': 'CRITICAL',
            'action': 'REJECT RESULT',
            'details': {
                'relation': relation,
                'max_residual': residual,
                'tolerance': self.residual_tol,
            },
            'message': message
        }

    def check_restriction(self, solved: SolutionGrid, boundary: BoundaryData) -> Dict[str, Any]:
        """
        Check 3: the solved grid reproduces its boundary layers.

        Args:
            solved: Solved grid
            boundary: Boundary data (one or two layers)

        Returns:
            Dictionary with check status and details
        """
        layers = [boundary.first] + ([boundary.second] if boundary.has_second_layer else [])
        mismatches = []
        checked = 0
        for t in solved.window.points():
            for beta, c in enumerate(t, start=1):
                if c >= len(layers):
                    continue
                try:
                    expected = layers[c][beta - 1](t[:beta - 1] + t[beta:])
                except OutOfWindow:
                    continue
                checked += 1
                if not values_close(solved.values[t], expected, self.oracle_tol):
                    mismatches.append({'point': t, 'beta': beta, 'layer': c})

        triggered = bool(mismatches)
        message = None
        if triggered:
            first = mismatches[0]
            message = (
                f"BOUNDARY RESTRICTION: {len(mismatches)} point(s) differ from the boundary data; "
                f"first at t={first['point']} (beta={first['beta']}, layer {first['layer']})"
            )

        return {
            'check': OracleCheck.BOUNDARY_RESTRICTION,
            'triggered': triggered,
            'severity': 'HIGH',
            'action': 'REJECT RESULT',
            'details': {
                'points_checked': checked,
                'mismatches': mismatches,
            },
            'message': message
        }

    def run_all_checks(
        self,
        solved: SolutionGrid,
        oracle: Optional[SolutionGrid] = None,
        residual: Optional[float] = None,
        boundary: Optional[BoundaryData] = None,
        relation: str = 'recurrence'
    ) -> Dict[str, Any]:
        """
        Run every check the caller has evidence for.

        Args:
            solved: Solved grid
            oracle: Optional oracle grid on the same window
            residual: Optional residual of the defining relation
            boundary: Optional boundary data to restrict against
            relation: Label for residual messages

        Returns:
            Dictionary with overall status, individual checks and alerts
        """
        results = {}
        if oracle is not None:
            results['oracle_deviation'] = self.check_oracle_deviation(solved, oracle)
        if residual is not None:
            results['recurrence_residual'] = self.check_residual(residual, relation)
        if boundary is not None:
            results['boundary_restriction'] = self.check_restriction(solved, boundary)

        # Collect all triggered alerts
        alerts = []
        for check_name, result in results.items():
            if result['triggered']:
                alerts.append({
                    'check': check_name,
                    'severity': result['severity'],
                    'action': result['action'],
                    'message': result['message']
                })

        return {
            'status': 'INCONSISTENT' if alerts else 'CONSISTENT',
            'checks': results,
            'alerts': alerts,
            'accept': not alerts
        }
