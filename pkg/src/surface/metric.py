"""
Ambient metrics g_ij(x) and their first derivatives.
"""

import logging
from typing import Any, Callable, Dict, Iterable, Optional

import numpy as np


logger = logging.getLogger(__name__)


class MetricField:
    """A Riemannian metric on R^n given by g(x) (n x n) and dg(x)[i, j, k] = d g_ij / d x^k."""

    def __init__(
        self,
        dim: int,
        g: Callable[[np.ndarray], np.ndarray],
        dg: Callable[[np.ndarray], np.ndarray],
        name: str = 'custom'
    ):
        """
        Initialize a metric field.

        Args:
            dim: Ambient dimension n (>= 2)
            g: x -> symmetric positive-definite n x n matrix
            dg: x -> n x n x n array of partial derivatives
            name: Label used in reports
        """
        if dim < 2:
            raise ValueError(f"Ambient dimension must be >= 2, got {dim}")
        self.dim = int(dim)
        self._g = g
        self._dg = dg
        self.name = name

    def g(self, x) -> np.ndarray:
        return np.asarray(self._g(np.asarray(x, dtype=float)), dtype=float)

    def dg(self, x) -> np.ndarray:
        return np.asarray(self._dg(np.asarray(x, dtype=float)), dtype=float)

    @property
    def is_flat(self) -> bool:
        return self.name == 'euclidean'

    @classmethod
    def euclidean(cls, dim: int = 3) -> 'MetricField':
        identity = np.eye(dim)
        zeros = np.zeros((dim, dim, dim))
        return cls(dim, lambda x: identity, lambda x: zeros, name='euclidean')

    @classmethod
    def demo_curved(cls, dim: int = 3, strength: float = 0.1) -> 'MetricField':
        """Conformally flat g(x) = (1 + c |x|^2) I."""
        identity = np.eye(dim)

        def g(x):
            return (1.0 + strength * float(x @ x)) * identity

        def dg(x):
            return 2.0 * strength * identity[:, :, np.newaxis] * x[np.newaxis, np.newaxis, :]

        return cls(dim, g, dg, name='demo-curved')

    @classmethod
    def by_name(cls, name: str, dim: int = 3) -> 'MetricField':
        if name == 'euclidean':
            return cls.euclidean(dim)
        if name == 'demo-curved':
            return cls.demo_curved(dim)
        raise ValueError(f"Unknown metric '{name}' (expected euclidean or demo-curved)")

    def validate(self, points: Iterable, step: float = 1e-6, tol: float = 1e-5) -> Dict[str, Any]:
        """
        Check symmetry, positive-definiteness and derivative consistency at sample points.

        Args:
            points: Sample points in R^n
            step: Central-difference step
            tol: Allowed deviation of dg from the central difference of g

        Returns:
            Dictionary containing:
                - pass: True if every point passed
                - details: per-check failure counts and worst derivative error
                - reason: first failure description
                - check: 'METRIC'
        """
        asymmetric = 0
        not_positive = 0
        worst_derivative = 0.0
        reason: Optional[str] = None
        count = 0

        for x in points:
            x = np.asarray(x, dtype=float)
            count += 1
            G = self.g(x)
            if not np.allclose(G, G.T, atol=1e-12):
                asymmetric += 1
                reason = reason or f"g is not symmetric at {x}"
            try:
                np.linalg.cholesky(G)
            except np.linalg.LinAlgError:
                not_positive += 1
                reason = reason or f"g is not positive-definite at {x}"

            analytic = self.dg(x)
            for k in range(self.dim):
                e = np.zeros(self.dim)
                e[k] = step
                numeric = (self.g(x + e) - self.g(x - e)) / (2.0 * step)
                error = float(np.max(np.abs(numeric - analytic[:, :, k])))
                worst_derivative = max(worst_derivative, error)
            if worst_derivative > tol and reason is None:
                reason = f"dg disagrees with finite differences of g near {x} ({worst_derivative:.2e})"

        passed = asymmetric == 0 and not_positive == 0 and worst_derivative <= tol
        if not passed:
            logger.warning("Metric %s failed validation: %s", self.name, reason)
        return {
            'check': 'METRIC',
            'pass': passed,
            'details': {
                'points': count,
                'asymmetric': asymmetric,
                'not_positive_definite': not_positive,
                'max_derivative_error': worst_derivative,
            },
            'reason': None if passed else reason,
        }

    def __repr__(self) -> str:
        return f"MetricField(name={self.name}, dim={self.dim})"
