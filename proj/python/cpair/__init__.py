"""Nearby commuting pairs for almost-commuting Hermitian matrices.

Matrices go in and come out as numpy arrays (complex128). Reports are plain
dicts with the same keys as the JSON written by the ``cpair`` tool.
"""

from ._core import (
    NumericalError,
    ValidationError,
    c0,
    check_lr,
    commutator_norm,
    generate,
    op_norm,
    partition_check,
    povm_report,
    scaling_study,
    smooth_filter,
    solve,
    verify_lemma4,
)

__all__ = [
    "NumericalError",
    "ValidationError",
    "c0",
    "check_lr",
    "commutator_norm",
    "generate",
    "op_norm",
    "partition_check",
    "povm_report",
    "scaling_study",
    "smooth_filter",
    "solve",
    "verify_lemma4",
]
