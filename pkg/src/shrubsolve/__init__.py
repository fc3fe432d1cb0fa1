"""Exact solvers for graphs given with low-depth tree-models, in polynomial space."""

from .errors import CapabilityError, ContractViolation, DomainError, ParseError, ShrubError
from .graph import LabeledGraph, parse_graph
from .tree_model import TreeModel, parse_tree_model, realize, validate

__version__ = "0.1.0"

__all__ = [
    "CapabilityError",
    "ContractViolation",
    "DomainError",
    "LabeledGraph",
    "ParseError",
    "ShrubError",
    "TreeModel",
    "parse_graph",
    "parse_tree_model",
    "realize",
    "validate",
]
