"""
Problem files.

A problem file is a JSON document naming the kind of problem, its arity and
dimension, the coefficient fields, the boundary data and the evaluation
window. Value fields accept:

    1.5 | [1, 2]                         constant literal
    {"constant": [[2, 0], [0, 1]]}       constant literal
    {"polynomial": [[c, [p1, p2]], ...]} integer polynomial sum c * s1^p1 * s2^p2
                                         (one term list per component when n > 1)
    {"rule": "mu"}                       named rule, see VECTOR_RULES / MATRIX_RULES
    {"table": "values.csv"}              table in the grid CSV layout

Boundary data accepts a single value spec (used for every hyperplane),
{"families": [spec_1, ..., spec_m]}, or {"restrict": spec} to restrict one
full sequence of arity m to the hyperplanes.
"""

import json
import logging
import os
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from src.errors import ProblemFileError
from src.lattice.boundary import BoundaryData
from src.lattice.indices import LatticeWindow
from src.lattice.sequences import MatrixSequence, VectorSequence
from src.solvers.higher_order import OrderKProblem
from src.solvers.linear import FirstOrderProblem
from src.solvers.second_order import SecondOrderProblem


logger = logging.getLogger(__name__)

KINDS = ('first_order', 'second_order', 'order_k', 'special', 'surface')
SPECIAL_TYPES = ('sum_power', 'root', 'epsilon_power', 'eigen_modes', 'general_modes')


def _diagonal_sequence(seeds: Sequence[float], coefficients: Sequence[float]) -> Callable[[int], float]:
    """u(k) with u(0..q-1) = seeds and u(k + q) = sum_j coefficients[j] u(k + j)."""
    seeds = [float(s) for s in seeds]
    coefficients = [float(c) for c in coefficients]
    if len(seeds) != len(coefficients) or not seeds:
        raise ValueError("diagonal_sequence needs as many seeds as coefficients")
    cache = list(seeds)

    def u(k: int) -> float:
        while len(cache) <= k:
            q = len(coefficients)
            cache.append(sum(c * v for c, v in zip(coefficients, cache[-q:])))
        return cache[k]

    return u


def _rule_mu(params: Dict[str, Any]) -> Callable:
    scale = float(params.get('scale', 1.0))
    cap = params.get('cap')

    def rule(point):
        value = min(point)
        if cap is not None:
            value = min(value, cap)
        return scale * value

    return rule


def _rule_diagonal_sequence(params: Dict[str, Any]) -> Callable:
    u = _diagonal_sequence(params['seeds'], params['coefficients'])
    return lambda point: u(min(point))


def _rule_index_difference(params: Dict[str, Any]) -> Callable:
    power = int(params.get('power', 1))
    return lambda point: float(point[0] - point[1]) ** power


VECTOR_RULES: Dict[str, Callable[[Dict[str, Any]], Callable]] = {
    'mu': _rule_mu,
    'diagonal_sequence': _rule_diagonal_sequence,
    'index_difference': _rule_index_difference,
}


def _rule_affine_sum(params: Dict[str, Any]) -> Callable:
    offset = float(params.get('offset', 0.0))
    scale = float(params.get('scale', 1.0))
    return lambda point: offset + scale * sum(point)


MATRIX_RULES: Dict[str, Callable[[Dict[str, Any]], Callable]] = {
    'affine_sum': _rule_affine_sum,
}


@dataclass
class ProblemSpec:
    """A parsed problem file."""

    kind: str
    arity: int
    dimension: int
    raw: Dict[str, Any]
    path: str
    window: Optional[LatticeWindow] = None
    options: Dict[str, Any] = field(default_factory=dict)
    text: str = ''

    @property
    def base_dir(self) -> str:
        return os.path.dirname(os.path.abspath(self.path))

    def resolve(self, relative: str) -> str:
        """Path relative to the problem file's directory."""
        return relative if os.path.isabs(relative) else os.path.join(self.base_dir, relative)

    def line_of(self, key: str) -> Optional[int]:
        """First line mentioning "key", for anchoring error messages."""
        needle = f'"{key}"'
        for number, line in enumerate(self.text.splitlines(), start=1):
            if needle in line:
                return number
        return None

    def error(self, key: str, message: str) -> ProblemFileError:
        return ProblemFileError(f"{key}: {message}", line=self.line_of(key.split('.')[0].split('[')[0]))

    def require(self, key: str) -> Any:
        if key not in self.raw:
            return self._missing(key)
        return self.raw[key]

    def _missing(self, key: str):
        raise ProblemFileError(f"missing required field '{key}' for kind '{self.kind}'", line=self.line_of('kind'))


def load_problem(path: str) -> ProblemSpec:
    """
    Parse a problem file.

    Args:
        path: Path to a JSON problem file

    Returns:
        ProblemSpec

    Raises:
        ProblemFileError: on unreadable files, JSON syntax errors (with line and column)
            and missing or invalid top-level fields
    """
    try:
        with open(path, 'r') as f:
            text = f.read()
    except OSError as exc:
        raise ProblemFileError(f"Cannot read problem file '{path}': {exc}") from exc

    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFileError(exc.msg, line=exc.lineno, column=exc.colno) from exc
    if not isinstance(raw, dict):
        raise ProblemFileError("top level must be an object", line=1, column=1)

    spec = ProblemSpec(kind='', arity=0, dimension=1, raw=raw, path=path, text=text)
    kind = raw.get('kind')
    if kind not in KINDS:
        raise ProblemFileError(f"kind must be one of {', '.join(KINDS)}, got {kind!r}", line=spec.line_of('kind'))
    spec.kind = kind

    if kind == 'surface':
        spec.options = dict(raw.get('options', {}))
        return spec

    arity = raw.get('arity')
    if not isinstance(arity, int) or arity < 2:
        raise ProblemFileError(f"arity must be an integer >= 2, got {arity!r}", line=spec.line_of('arity'))
    spec.arity = arity

    dimension = raw.get('dimension', 1)
    if not isinstance(dimension, int) or dimension < 1:
        raise ProblemFileError(f"dimension must be a positive integer, got {dimension!r}", line=spec.line_of('dimension'))
    spec.dimension = dimension

    if 'window' in raw:
        spec.window = parse_window(raw['window'], arity, spec)
    spec.options = dict(raw.get('options', {}))
    logger.debug("Loaded %s problem from %s (arity %d, dimension %d)", kind, path, arity, dimension)
    return spec


def parse_window(value: Any, arity: int, spec: Optional[ProblemSpec] = None) -> LatticeWindow:
    """
    Window bounds from a list or a comma-separated string.

    Args:
        value: [T1, ..., Tm] or "T1,...,Tm" (a single bound is repeated m times)
        arity: Expected arity
        spec: Problem used to anchor errors

    Returns:
        LatticeWindow
    """
    line = spec.line_of('window') if spec is not None else None
    try:
        if isinstance(value, str):
            bounds = [int(part) for part in value.split(',') if part.strip()]
        else:
            bounds = [int(b) for b in value]
    except (TypeError, ValueError) as exc:
        raise ProblemFileError(f"window must list integer bounds, got {value!r}", line=line) from exc
    if len(bounds) == 1:
        bounds = bounds * arity
    if len(bounds) != arity:
        raise ProblemFileError(f"window needs {arity} bounds, got {len(bounds)}", line=line)
    try:
        return LatticeWindow(tuple(bounds))
    except ValueError as exc:
        raise ProblemFileError(str(exc), line=line) from exc


def _polynomial(terms: Any, arity: int, key: str, spec: ProblemSpec) -> Callable:
    parsed = []
    for term in terms:
        if not (isinstance(term, (list, tuple)) and len(term) == 2 and isinstance(term[1], (list, tuple))):
            raise spec.error(key, f"polynomial terms are [coefficient, [powers]], got {term!r}")
        coefficient, powers = term
        if not isinstance(coefficient, int) or isinstance(coefficient, bool):
            raise spec.error(key, f"polynomial coefficients must be integers, got {coefficient!r}")
        if len(powers) != arity or any(not isinstance(p, int) or p < 0 for p in powers):
            raise spec.error(key, f"polynomial powers must be {arity} non-negative integers, got {powers!r}")
        parsed.append((coefficient, tuple(powers)))

    def evaluate(point) -> float:
        total = 0
        for coefficient, powers in parsed:
            value = coefficient
            for c, p in zip(point, powers):
                value *= int(c) ** p
            total += value
        return float(total)

    return evaluate


def _is_term_list(value: Any) -> bool:
    return isinstance(value, list) and bool(value) and all(
        isinstance(term, list) and len(term) == 2 and isinstance(term[1], list) for term in value
    )


def _read_table(spec: ProblemSpec, relative: str, key: str, prefix: str) -> pd.DataFrame:
    path = spec.resolve(relative)
    if not os.path.exists(path):
        raise spec.error(key, f"table file '{relative}' not found")
    try:
        frame = pd.read_csv(path, float_precision='round_trip')
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise spec.error(key, f"cannot parse table '{relative}': {exc}") from exc
    if not any(c.startswith('t') for c in frame.columns) or not any(c.startswith(prefix) for c in frame.columns):
        raise spec.error(key, f"table '{relative}' needs t* and {prefix}* columns")
    return frame


def _table_values(frame: pd.DataFrame, value_cols: List[str], trailing: tuple) -> tuple:
    t_cols = [c for c in frame.columns if c.startswith('t')]
    window = LatticeWindow(tuple(int(frame[c].max()) for c in t_cols))
    values = np.full(window.shape + trailing, np.nan)
    points = frame[t_cols].to_numpy(dtype=np.int64)
    values[tuple(points.T)] = frame[value_cols].to_numpy(dtype=float).reshape((len(frame),) + trailing)
    if np.isnan(values).any():
        raise ValueError("table does not cover its window")
    return window, values


def vector_spec(value: Any, arity: int, dim: int, spec: ProblemSpec, key: str) -> VectorSequence:
    """
    Build a VectorSequence of the given arity and dimension from a value spec.

    Raises:
        ProblemFileError: on any malformed spec
    """
    if isinstance(value, (int, float, list)) and not isinstance(value, bool):
        return _vector_constant(value, arity, dim, spec, key)
    if not isinstance(value, dict):
        raise spec.error(key, f"unsupported value spec {value!r}")

    if 'constant' in value:
        return _vector_constant(value['constant'], arity, dim, spec, key)

    if 'polynomial' in value:
        components = value['polynomial']
        if _is_term_list(components):
            components = [components]
        if len(components) != dim:
            raise spec.error(key, f"polynomial needs {dim} component(s), got {len(components)}")
        evaluators = [_polynomial(terms, arity, key, spec) for terms in components]
        return VectorSequence.from_rule(lambda t: [e(t) for e in evaluators], arity, dim)

    if 'rule' in value:
        name = value['rule']
        if name not in VECTOR_RULES:
            raise spec.error(key, f"unknown rule '{name}' (known: {', '.join(sorted(VECTOR_RULES))})")
        try:
            scalar = VECTOR_RULES[name](value)
        except (KeyError, ValueError) as exc:
            raise spec.error(key, f"rule '{name}' is missing parameters: {exc}") from exc
        return VectorSequence.from_rule(lambda t: np.full(dim, scalar(t)), arity, dim)

    if 'table' in value:
        frame = _read_table(spec, value['table'], key, 'x')
        x_cols = [c for c in frame.columns if c.startswith('x')]
        try:
            window, values = _table_values(frame, x_cols, (len(x_cols),))
        except ValueError as exc:
            raise spec.error(key, str(exc)) from exc
        if window.arity != arity or len(x_cols) != dim:
            raise spec.error(key, f"table has arity {window.arity} and dimension {len(x_cols)}, expected {arity} and {dim}")
        return VectorSequence.from_table(window, values)

    raise spec.error(key, f"value spec needs one of constant, polynomial, rule, table; got {sorted(value)}")


def _vector_constant(value: Any, arity: int, dim: int, spec: ProblemSpec, key: str) -> VectorSequence:
    arr = np.atleast_1d(np.asarray(value, dtype=float))
    if arr.shape == (1,) and dim > 1:
        arr = np.full(dim, arr[0])
    if arr.shape != (dim,):
        raise spec.error(key, f"constant needs {dim} component(s), got shape {arr.shape}")
    return VectorSequence.constant(arr, arity)


def matrix_spec(value: Any, arity: int, dim: int, spec: ProblemSpec, key: str) -> MatrixSequence:
    """
    Build a MatrixSequence from a value spec.

    Raises:
        ProblemFileError: on any malformed spec
    """
    if isinstance(value, dict) and 'constant' in value:
        value = value['constant']
    if isinstance(value, (int, float, list)) and not isinstance(value, bool):
        arr = np.asarray(value, dtype=float)
        if arr.ndim == 0:
            arr = float(arr) * np.eye(dim)
        if arr.shape != (dim, dim):
            raise spec.error(key, f"matrix needs shape ({dim}, {dim}), got {arr.shape}")
        return MatrixSequence.constant(arr, arity)
    if not isinstance(value, dict):
        raise spec.error(key, f"unsupported matrix spec {value!r}")

    if 'polynomial' in value:
        rows = value['polynomial']
        if dim == 1 and _is_term_list(rows):
            rows = [[rows]]
        if len(rows) != dim or any(len(row) != dim for row in rows):
            raise spec.error(key, f"polynomial matrix needs {dim}x{dim} entries")
        entries = [[_polynomial(terms, arity, key, spec) for terms in row] for row in rows]
        return MatrixSequence.from_rule(lambda t: [[e(t) for e in row] for row in entries], arity, dim)

    if 'rule' in value:
        name = value['rule']
        if name not in MATRIX_RULES:
            raise spec.error(key, f"unknown matrix rule '{name}' (known: {', '.join(sorted(MATRIX_RULES))})")
        scalar = MATRIX_RULES[name](value)
        identity = np.eye(dim)
        return MatrixSequence.from_rule(lambda t: scalar(t) * identity, arity, dim)

    if 'table' in value:
        frame = _read_table(spec, value['table'], key, 'a')
        a_cols = [f'a{r + 1}{c + 1}' for r in range(dim) for c in range(dim)]
        missing = [c for c in a_cols if c not in frame.columns]
        if missing:
            raise spec.error(key, f"matrix table is missing columns {missing}")
        try:
            window, values = _table_values(frame, a_cols, (dim, dim))
        except ValueError as exc:
            raise spec.error(key, str(exc)) from exc
        if window.arity != arity:
            raise spec.error(key, f"matrix table has arity {window.arity}, expected {arity}")
        return MatrixSequence.from_table(window, values)

    raise spec.error(key, f"matrix spec needs one of constant, polynomial, rule, table; got {sorted(value)}")


def boundary_families(
    value: Any,
    arity: int,
    dim: int,
    spec: ProblemSpec,
    key: str,
    level: int = 0
) -> List[VectorSequence]:
    """
    The m families of one boundary layer t^beta = level.

    Args:
        value: Boundary spec
        arity: Lattice arity m
        dim: Dimension n
        spec: Problem being built
        key: Field name for errors
        level: Hyperplane offset (used by restrict specs)

    Returns:
        List of m VectorSequences of arity m - 1
    """
    if isinstance(value, dict) and 'restrict' in value:
        full = vector_spec(value['restrict'], arity, dim, spec, f'{key}.restrict')
        return list(BoundaryData.from_full_sequence(full, arity, dim, level=level).first)
    if isinstance(value, dict) and 'families' in value:
        families = value['families']
        if not isinstance(families, list) or len(families) != arity:
            raise spec.error(key, f"families needs exactly {arity} entries")
        return [
            vector_spec(item, arity - 1, dim, spec, f'{key}.families[{beta}]')
            for beta, item in enumerate(families, start=1)
        ]
    family = vector_spec(value, arity - 1, dim, spec, key)
    return [family] * arity


def build_first_order(spec: ProblemSpec) -> FirstOrderProblem:
    m, n = spec.arity, spec.dimension
    A = matrix_spec(spec.require('A'), m, n, spec, 'A')
    b = vector_spec(spec.raw['b'], m, n, spec, 'b') if 'b' in spec.raw else VectorSequence.zeros(m, n)
    first = boundary_families(spec.require('boundary'), m, n, spec, 'boundary')
    return FirstOrderProblem(A, b, BoundaryData(m, n, first))


def build_second_order(spec: ProblemSpec) -> SecondOrderProblem:
    m = spec.arity
    if spec.dimension != 1:
        raise spec.error('dimension', "second-order problems are scalar")
    a, b = spec.require('a'), spec.require('b')
    if not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in (a, b)):
        raise spec.error('a', "coefficients a and b must be numbers")
    boundary = spec.require('boundary')
    first = boundary_families(boundary, m, 1, spec, 'boundary', level=0)
    if 'boundary2' in spec.raw:
        second = boundary_families(spec.raw['boundary2'], m, 1, spec, 'boundary2', level=1)
    elif isinstance(boundary, dict) and 'restrict' in boundary:
        second = boundary_families(boundary, m, 1, spec, 'boundary', level=1)
    else:
        return spec._missing('boundary2')
    return SecondOrderProblem(a, b, BoundaryData(m, 1, first, second))


def build_order_k(spec: ProblemSpec) -> OrderKProblem:
    m, n = spec.arity, spec.dimension
    blocks = spec.require('B')
    if not isinstance(blocks, list) or len(blocks) < 2:
        raise spec.error('B', "B must list the k >= 2 coefficient matrices B_0..B_{k-1}")
    k = len(blocks)
    coefficients = [matrix_spec(item, m, n, spec, f'B[{j}]') for j, item in enumerate(blocks)]
    forcing = vector_spec(spec.raw['f'], m, n, spec, 'f') if 'f' in spec.raw else VectorSequence.zeros(m, n)

    if 'layers' in spec.raw:
        layer_specs = spec.raw['layers']
        if not isinstance(layer_specs, list):
            raise spec.error('layers', "layers must be a list of boundary specs")
        layers = [
            BoundaryData(m, n, boundary_families(item, m, n, spec, f'layers[{j}]', level=j))
            for j, item in enumerate(layer_specs)
        ]
    else:
        boundary = spec.require('boundary')
        if not (isinstance(boundary, dict) and 'restrict' in boundary):
            raise spec.error('boundary', "order-k problems need 'layers' or a 'restrict' boundary")
        layers = [
            BoundaryData(m, n, boundary_families(boundary, m, n, spec, 'boundary', level=j))
            for j in range(k)
        ]
    return OrderKProblem(coefficients, forcing, layers)


def special_settings(spec: ProblemSpec) -> Dict[str, Any]:
    """
    Validated settings of a special-solution problem.

    Returns:
        Dictionary with 'type', 'A' (ndarray) and the type's parameters as arrays
    """
    construction = spec.require('construction')
    if not isinstance(construction, dict) or construction.get('type') not in SPECIAL_TYPES:
        raise spec.error('construction', f"construction.type must be one of {', '.join(SPECIAL_TYPES)}")
    A = np.asarray(spec.require('A'), dtype=float)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    if A.shape != (spec.dimension, spec.dimension):
        raise spec.error('A', f"A needs shape ({spec.dimension}, {spec.dimension}), got {A.shape}")

    settings: Dict[str, Any] = {'type': construction['type'], 'A': A}
    kind = construction['type']
    if kind in ('sum_power', 'root', 'epsilon_power'):
        settings['x0'] = _fixed_vector(construction, 'x0', spec)
    if kind == 'epsilon_power':
        epsilon = construction.get('epsilon')
        if not isinstance(epsilon, list) or len(epsilon) != spec.arity:
            raise spec.error('construction', f"epsilon needs {spec.arity} integer weights")
        settings['epsilon'] = tuple(int(e) for e in epsilon)
    if kind == 'eigen_modes':
        settings['alpha'] = int(construction.get('alpha', 1))
        settings['h'] = _fixed_vector(construction, 'h', spec)
    if kind == 'general_modes':
        first = boundary_families(construction.get('boundary', {'constant': 0}), spec.arity, spec.dimension, spec, 'construction')
        settings['boundary'] = BoundaryData(spec.arity, spec.dimension, first)
    return settings


def _fixed_vector(construction: Dict[str, Any], name: str, spec: ProblemSpec) -> np.ndarray:
    if name not in construction:
        raise spec.error('construction', f"missing '{name}'")
    value = np.atleast_1d(np.asarray(construction[name], dtype=float))
    if value.shape != (spec.dimension,):
        raise spec.error('construction', f"'{name}' needs {spec.dimension} component(s)")
    return value


def surface_settings(spec: ProblemSpec) -> Dict[str, Any]:
    """Mesh path and Newton options of a surface problem."""
    mesh = spec.require('mesh')
    return {
        'mesh': spec.resolve(mesh),
        'metric': spec.raw.get('metric', 'euclidean'),
        'options': spec.options,
    }
