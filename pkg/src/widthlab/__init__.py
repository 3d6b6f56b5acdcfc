"""Unary clique-width terms for relational structures, with and without fusion."""

from .structures import (
    ColoredStructure,
    GaifmanGraph,
    Signature,
    Structure,
    Symbol,
    gaifman_graph,
    graph_structure,
)
from .terms import WidthTerm, evaluate, parse_term, render_term, stats, validate

__all__ = [
    "ColoredStructure",
    "GaifmanGraph",
    "Signature",
    "Structure",
    "Symbol",
    "WidthTerm",
    "evaluate",
    "gaifman_graph",
    "graph_structure",
    "parse_term",
    "render_term",
    "stats",
    "validate",
]

__version__ = "0.1.0"
