"""Exact linear algebra, explicit column partitions and local densities for
magic squares of d-th powers."""

from magicpowers.core_matrix import ColumnRef, MagicMatrix, Sigma, build_magic_matrix
from magicpowers.errors import BudgetExceeded, CertificationError

__all__ = [
    "BudgetExceeded",
    "CertificationError",
    "ColumnRef",
    "MagicMatrix",
    "Sigma",
    "build_magic_matrix",
]

__version__ = "0.1.0"
