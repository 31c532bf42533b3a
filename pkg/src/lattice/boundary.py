"""
Hyperplane boundary data and its compatibility conditions.

For a diagonal recurrence on N^m the role of initial conditions is played by
the families f_beta giving x on each hyperplane t^beta = 0 (and g_beta on
t^beta = 1 for second-order problems). A family is a VectorSequence of arity
m - 1 whose argument is t with the beta-th coordinate removed.

Where two hyperplanes meet the families must agree, otherwise no
single-valued solution exists. The checks here report every disagreement
as data; it is up to the solvers to refuse incompatible input.
"""

import logging
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from src.config import get_settings
from src.errors import IncompatibleBoundary, OutOfWindow
from src.lattice.indices import LatticeWindow, diag_shift, insert_coordinate
from src.lattice.sequences import VectorSequence
from src.utils.linalg_helpers import values_close


logger = logging.getLogger(__name__)

Point = Tuple[int, ...]


class BoundaryData:
    """First-layer families f_beta and optional second-layer families g_beta."""

    def __init__(
        self,
        arity: int,
        dim: int,
        first: Sequence[VectorSequence],
        second: Optional[Sequence[VectorSequence]] = None
    ):
        """
        Initialize boundary data.

        Args:
            arity: Lattice arity m (>= 2)
            dim: Value dimension n
            first: m families giving x on t^beta = 0
            second: Optional m families giving x on t^beta = 1
        """
        if arity < 2:
            raise ValueError(f"Boundary data needs arity >= 2, got {arity}")
        self.arity = int(arity)
        self.dim = int(dim)
        self.first = tuple(first)
        self.second = tuple(second) if second is not None else None
        self._validate_layer(self.first, 'first')
        if self.second is not None:
            self._validate_layer(self.second, 'second')

    def _validate_layer(self, families: Tuple[VectorSequence, ...], name: str):
        if len(families) != self.arity:
            raise ValueError(
                f"{name} layer needs exactly {self.arity} families, got {len(families)}"
            )
        for beta, family in enumerate(families, start=1):
            if family.arity != self.arity - 1:
                raise ValueError(
                    f"{name} layer family {beta} has arity {family.arity}, expected {self.arity - 1}"
                )
            if family.dim != self.dim:
                raise ValueError(
                    f"{name} layer family {beta} has dimension {family.dim}, expected {self.dim}"
                )

    @property
    def has_second_layer(self) -> bool:
        return self.second is not None

    def family(self, beta: int, layer: int = 0) -> VectorSequence:
        """The family on t^beta = layer (layer 0 or 1)."""
        if layer == 0:
            return self.first[beta - 1]
        if layer == 1 and self.second is not None:
            return self.second[beta - 1]
        raise ValueError(f"No boundary layer {layer}")

    def value(self, beta: int, reduced: Sequence[int], layer: int = 0) -> np.ndarray:
        return self.family(beta, layer)(tuple(reduced))

    @classmethod
    def constant(cls, value, arity: int, layers: int = 1, second_value=None) -> 'BoundaryData':
        """
        Every family identically equal to value (second layer: second_value).

        Args:
            value: Constant vector (or scalar for n = 1)
            arity: Lattice arity m
            layers: 1 or 2
            second_value: Constant for the second layer (defaults to value)

        Returns:
            BoundaryData
        """
        vec = np.atleast_1d(np.asarray(value, dtype=float))
        first = [VectorSequence.constant(vec, arity - 1) for _ in range(arity)]
        second = None
        if layers == 2:
            svec = vec if second_value is None else np.atleast_1d(np.asarray(second_value, dtype=float))
            second = [VectorSequence.constant(svec, arity - 1) for _ in range(arity)]
        return cls(arity, vec.shape[0], first, second)

    @classmethod
    def from_full_sequence(
        cls,
        x: Callable[[Point], object],
        arity: int,
        dim: int,
        layers: int = 1,
        level: int = 0
    ) -> 'BoundaryData':
        """
        Restrict a single full sequence x: N^m -> R^n to its hyperplanes.

        Data obtained this way is compatible by construction, since
        x restricted to t^alpha = t^beta = 0 does not depend on the order
        of restriction.

        Args:
            x: Callable on full m-tuples (or a VectorSequence of arity m)
            arity: Lattice arity m
            dim: Value dimension n
            layers: 1 (t^beta = level) or 2 (also t^beta = level + 1)
            level: Hyperplane offset of the first layer

        Returns:
            BoundaryData
        """
        def restricted(beta: int, at: int) -> VectorSequence:
            return VectorSequence.from_rule(
                lambda s, beta=beta, at=at: x(insert_coordinate(s, beta, at)),
                arity - 1,
                dim,
            )

        first = [restricted(beta, level) for beta in range(1, arity + 1)]
        second = None
        if layers == 2:
            second = [restricted(beta, level + 1) for beta in range(1, arity + 1)]
        return cls(arity, dim, first, second)

    def __repr__(self) -> str:
        layers = 2 if self.has_second_layer else 1
        return f"BoundaryData(arity={self.arity}, dim={self.dim}, layers={layers})"


def _pair_points(
    window: LatticeWindow,
    arity: int,
    alpha: int,
    beta: int,
    level_alpha: int,
    level_beta: int
) -> Iterator[Point]:
    """Full points with t^alpha = level_alpha and t^beta = level_beta."""
    if window.arity == arity:
        if level_alpha > window.bounds[alpha - 1] or level_beta > window.bounds[beta - 1]:
            return
        for t in window.points():
            if t[alpha - 1] == level_alpha and t[beta - 1] == level_beta:
                yield t
        return
    # window is the common argument box of the families
    for s in window.points():
        t = insert_coordinate(s, alpha, level_alpha)
        if t[beta - 1] != level_beta:
            continue
        reduced_beta = t[:beta - 1] + t[beta:]
        if window.contains(reduced_beta):
            yield t


def _conditions(bd: BoundaryData) -> List[Tuple[str, int, int, int, int, int, int]]:
    """(name, alpha, beta, layer_alpha, layer_beta, level_alpha, level_beta) per condition."""
    m = bd.arity
    conditions = []
    for alpha in range(1, m + 1):
        for beta in range(alpha + 1, m + 1):
            conditions.append(('f-f', alpha, beta, 0, 0, 0, 0))
    if bd.has_second_layer:
        for alpha in range(1, m + 1):
            for beta in range(alpha + 1, m + 1):
                conditions.append(('g-g', alpha, beta, 1, 1, 1, 1))
        for alpha in range(1, m + 1):
            for beta in range(1, m + 1):
                if alpha != beta:
                    # f_alpha on t^beta = 1 against g_beta on t^alpha = 0
                    conditions.append(('f-g', alpha, beta, 0, 1, 0, 1))
    return conditions


def check_compatibility(
    bd: BoundaryData,
    w: LatticeWindow,
    tol: Optional[float] = None
) -> Dict[str, Any]:
    """
    Check that the hyperplane families agree on every intersection in a window.

    Args:
        bd: Boundary data
        w: Either the common argument window of the families (arity m - 1) or a
           full lattice window (arity m)
        tol: Absolute tolerance for non-integral values (default from settings)

    Returns:
        Dictionary containing:
            - pass: True if no violation was found
            - violations: list of dicts (condition, alpha, beta, point, left, right)
            - details: counts of checked and skipped points
            - reason: summary string when failed
            - check: 'COMPATIBILITY'
    """
    if w.arity not in (bd.arity, bd.arity - 1):
        raise ValueError(
            f"Window arity {w.arity} does not fit boundary arity {bd.arity}"
        )
    tol = get_settings().tolerance if tol is None else tol

    violations = []
    checked = 0
    skipped = 0
    for name, alpha, beta, layer_a, layer_b, level_a, level_b in _conditions(bd):
        fam_a = bd.family(alpha, layer_a)
        fam_b = bd.family(beta, layer_b)
        for t in _pair_points(w, bd.arity, alpha, beta, level_a, level_b):
            arg_a = t[:alpha - 1] + t[alpha:]
            arg_b = t[:beta - 1] + t[beta:]
            try:
                left = fam_a(arg_a)
                right = fam_b(arg_b)
            except OutOfWindow:
                skipped += 1
                continue
            checked += 1
            if not values_close(left, right, tol):
                violations.append({
                    'condition': name,
                    'alpha': alpha,
                    'beta': beta,
                    'point': t,
                    'left': left.copy(),
                    'right': right.copy(),
                })

    passed = not violations
    reason = None
    if not passed:
        first = violations[0]
        reason = (
            f"{len(violations)} compatibility violation(s); first at t={first['point']} "
            f"({first['condition']}, alpha={first['alpha']}, beta={first['beta']})"
        )
    if skipped:
        logger.debug("Compatibility check skipped %d point(s) outside table windows", skipped)

    return {
        'check': 'COMPATIBILITY',
        'pass': passed,
        'violations': violations,
        'details': {
            'points_checked': checked,
            'points_skipped': skipped,
            'second_layer': bd.has_second_layer,
            'window': w.bounds,
        },
        'reason': reason,
    }


def is_diagonal_constant(y: VectorSequence, w: LatticeWindow, tol: Optional[float] = None) -> bool:
    """
    Membership test for the diagonal-constant sequences: y(t + 1) = y(t).

    Args:
        y: Sequence of arity w.arity
        w: Window; every t with t + 1 inside w is tested
        tol: Absolute tolerance for non-integral values (default from settings)

    Returns:
        True if y is invariant under the diagonal shift on w
    """
    tol = get_settings().tolerance if tol is None else tol
    for t in w.points():
        if min(t) == 0:
            continue
        # t here is the advanced point t + 1
        previous = diag_shift(t, -1)
        if not values_close(y(t), y(previous), tol):
            return False
    return True


def _shell_suppliers(
    layers: Sequence[Sequence[VectorSequence]],
    t: Point
) -> List[Tuple[int, int, np.ndarray]]:
    """(beta, layer, value) for every hyperplane layer t^beta = layer < len(layers) through t."""
    suppliers = []
    for beta, c in enumerate(t, start=1):
        if c < len(layers):
            suppliers.append((beta, c, layers[c][beta - 1](t[:beta - 1] + t[beta:])))
    return suppliers


def shell_value(
    layers: Sequence[Sequence[VectorSequence]],
    t: Point,
    tol: Optional[float] = None
) -> np.ndarray:
    """
    Boundary value at a point with mu(t) < number of layers.

    Every layer through t supplies a value and all of them must agree.

    Args:
        layers: layers[j][beta - 1] is the family on t^beta = j
        t: Full lattice point with mu(t) < len(layers)
        tol: Absolute tolerance for non-integral values

    Returns:
        The common value

    Raises:
        IncompatibleBoundary: if two suppliers disagree
    """
    tol = get_settings().tolerance if tol is None else tol
    suppliers = _shell_suppliers(layers, t)
    if not suppliers:
        raise ValueError(f"Point {t} is not on any of the {len(layers)} boundary layer(s)")
    beta0, layer0, value = suppliers[0]
    for beta, layer, other in suppliers[1:]:
        if not values_close(value, other, tol):
            violation = {
                'condition': f'layer{layer0}-layer{layer}',
                'alpha': beta0,
                'beta': beta,
                'point': t,
                'left': value.copy(),
                'right': other.copy(),
            }
            raise IncompatibleBoundary(
                f"Boundary layers disagree at t={t}: "
                f"t^{beta0}={layer0} gives {value}, t^{beta}={layer} gives {other}",
                report={'check': 'SHELL', 'pass': False, 'violations': [violation]},
            )
    return value


def check_shell(
    layers: Sequence[Sequence[VectorSequence]],
    w: LatticeWindow,
    tol: Optional[float] = None
) -> Dict[str, Any]:
    """
    Check that stacked boundary layers agree on every shell point of a window.

    The shell is the set of points with mu(t) < len(layers); each of them
    lies on one or more layers and receives a value from each.

    Args:
        layers: layers[j][beta - 1] is the family on t^beta = j
        w: Full lattice window
        tol: Absolute tolerance for non-integral values

    Returns:
        Report dictionary with the same keys as check_compatibility
    """
    tol = get_settings().tolerance if tol is None else tol
    depth = len(layers)
    violations = []
    checked = 0
    skipped = 0
    for t in w.points():
        if min(t) >= depth:
            continue
        try:
            suppliers = _shell_suppliers(layers, t)
        except OutOfWindow:
            skipped += 1
            continue
        checked += 1
        beta0, layer0, value = suppliers[0]
        for beta, layer, other in suppliers[1:]:
            if not values_close(value, other, tol):
                violations.append({
                    'condition': f'layer{layer0}-layer{layer}',
                    'alpha': beta0,
                    'beta': beta,
                    'point': t,
                    'left': value.copy(),
                    'right': other.copy(),
                })

    passed = not violations
    reason = None
    if not passed:
        first = violations[0]
        reason = (
            f"{len(violations)} layer disagreement(s); first at t={first['point']} "
            f"({first['condition']}, alpha={first['alpha']}, beta={first['beta']})"
        )
    return {
        'check': 'SHELL',
        'pass': passed,
        'violations': violations,
        'details': {
            'points_checked': checked,
            'points_skipped': skipped,
            'layers': depth,
            'window': w.bounds,
        },
        'reason': reason,
    }
