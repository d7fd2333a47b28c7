"""Toolkit for creating, preprocessing, analyzing and solving QUBO instances."""

from .assignment import PartialAssignment, from_pairs, parse_assignment_expr, parse_bitvec_expr, partial_assignment
from .core import IsingModel, QuboInstance, Solution
from .errors import ConflictError, FormatError, InstanceError, ParseError, QuboError, ResourceCapError

qubo = QuboInstance

__all__ = [
    "ConflictError",
    "FormatError",
    "InstanceError",
    "IsingModel",
    "ParseError",
    "PartialAssignment",
    "QuboError",
    "QuboInstance",
    "ResourceCapError",
    "Solution",
    "from_pairs",
    "parse_assignment_expr",
    "parse_bitvec_expr",
    "partial_assignment",
    "qubo",
]
