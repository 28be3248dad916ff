"""Counting constants of nilpotent Galois groups and their verification."""

__version__ = "0.1.0"

from .errors import NilcountError
from .malle import BaseFieldData, b_constant, ind, k_classes, min_index
from .permcore import PermGroup, Permutation, parse_generators
from .series import enumerate_refinements, optimize_d, refinement_data

__all__ = [
    "BaseFieldData",
    "NilcountError",
    "PermGroup",
    "Permutation",
    "b_constant",
    "enumerate_refinements",
    "ind",
    "k_classes",
    "min_index",
    "optimize_d",
    "parse_generators",
    "refinement_data",
]
