"""
Synthetic problem builders shared by the test modules.

Every builder takes a seed so failures are reproducible.
"""

import json
import os
from pathlib import Path
from typing import Any, Dict

import numpy as np

from src.lattice import BoundaryData, MatrixSequence, VectorSequence
from src.runner import random_first_order, random_full_sequence, random_order_k, random_second_order
from src.solvers import FirstOrderProblem, OrderKProblem, SecondOrderProblem
from src.surface import SurfaceGrid, planar_grid


PROBLEMS_DIR = Path(__file__).resolve().parent.parent / 'problems'
GOLDEN_DIR = Path(__file__).resolve().parent / 'golden'


def create_random_first_order_problem(seed: int = 42, arity: int = 2, dim: int = 2) -> FirstOrderProblem:
    """
    First-order problem with varying coefficients and compatible boundary data.

    Args:
        seed: Random seed for reproducibility
        arity: Lattice arity m
        dim: Value dimension n

    Returns:
        FirstOrderProblem
    """
    return random_first_order(np.random.default_rng(seed), arity, dim)


def create_random_second_order_problem(seed: int = 42, arity: int = 2) -> SecondOrderProblem:
    return random_second_order(np.random.default_rng(seed), arity)


def create_random_order_k_problem(seed: int = 42, arity: int = 2, order: int = 3, dim: int = 1) -> OrderKProblem:
    return random_order_k(np.random.default_rng(seed), arity, order, dim)


def create_constant_problem(A, b, f, arity: int = 2) -> FirstOrderProblem:
    """Constant A, constant b and every family identically f."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    n = A.shape[0]
    return FirstOrderProblem(
        MatrixSequence.constant(A, arity),
        VectorSequence.constant(np.broadcast_to(np.asarray(b, dtype=float), (n,)), arity),
        BoundaryData.constant(np.broadcast_to(np.asarray(f, dtype=float), (n,)), arity),
    )


def create_full_sequence(seed: int = 42, arity: int = 2, dim: int = 1):
    """Random integer polynomial on N^m, used to build compatible data by restriction."""
    return random_full_sequence(np.random.default_rng(seed), arity, dim)


def diagonal_sequence(seeds, coefficients, length: int):
    """u(0..length-1) for u(k + q) = sum_j coefficients[j] u(k + j)."""
    values = list(seeds)
    q = len(coefficients)
    while len(values) < length:
        values.append(sum(c * v for c, v in zip(coefficients, values[-q:])))
    return values


def create_noisy_grid(seed: int = 42, M: int = 4, N: int = 4, dim: int = 3, noise: float = 0.1) -> SurfaceGrid:
    """
    Planar grid on the unit square with every node perturbed.

    Args:
        seed: Random seed
        M: Cells in the first direction
        N: Cells in the second direction
        dim: Ambient dimension
        noise: Perturbation amplitude (kept small so no cell degenerates)

    Returns:
        SurfaceGrid
    """
    rng = np.random.default_rng(seed)
    grid = planar_grid(M, N, 1.0 / M, 1.0 / N, dim)
    nodes = grid.nodes.copy()
    nodes[..., 2:] += rng.uniform(-noise, noise, size=nodes[..., 2:].shape)
    nodes[..., :2] += rng.uniform(-noise, noise, size=nodes[..., :2].shape) / max(M, N)
    return grid.with_nodes(nodes)


def write_problem(directory, name: str, document: Dict[str, Any]) -> str:
    """Write a JSON problem into a pytest tmp_path and return its path."""
    path = os.path.join(str(directory), name)
    with open(path, 'w') as f:
        json.dump(document, f, indent=2)
    return path
