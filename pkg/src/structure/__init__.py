"""Diagonal-constant sequences and the isomorphism onto homogeneous solutions."""

from .psi import (
    DiagonalConstantSeq,
    psi_apply,
    psi_inverse,
    make_yk_generator,
    diagonal_extension,
)

__all__ = [
    'DiagonalConstantSeq',
    'psi_apply',
    'psi_inverse',
    'make_yk_generator',
    'diagonal_extension',
]
