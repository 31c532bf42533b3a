"""Lattice arithmetic, coefficient fields and boundary data."""

from .indices import (
    MultiIndex,
    LatticeWindow,
    as_index,
    insert_coordinate,
    mu,
    diag_shift,
    argmin_beta,
    minimizing_betas,
)
from .sequences import (
    SequenceBacking,
    ConstantBacking,
    TableBacking,
    RuleBacking,
    MatrixSequence,
    VectorSequence,
)
from .boundary import (
    BoundaryData,
    check_compatibility,
    check_shell,
    shell_value,
    is_diagonal_constant,
)

__all__ = [
    'MultiIndex',
    'LatticeWindow',
    'as_index',
    'insert_coordinate',
    'mu',
    'diag_shift',
    'argmin_beta',
    'minimizing_betas',
    'SequenceBacking',
    'ConstantBacking',
    'TableBacking',
    'RuleBacking',
    'MatrixSequence',
    'VectorSequence',
    'BoundaryData',
    'check_compatibility',
    'check_shell',
    'shell_value',
    'is_diagonal_constant',
]
