"""Game Description Language: terms, readers, and static analysis."""

from .parse import make_program, parse_any, parse_program, parse_prolog
from .strata import (
    DepGraph,
    Edge,
    Strata,
    check_stratified,
    dependency_graph,
    stratify,
    validate_safety,
)
from .terms import (
    Atom,
    Compound,
    FlatAtom,
    Literal,
    Program,
    Rule,
    Term,
    Var,
    atom_key,
    atom_to_gdl,
    atom_to_prolog,
    is_ground,
    program_to_gdl,
    term_key,
    term_to_gdl,
)

__all__ = [
    "Atom",
    "Compound",
    "DepGraph",
    "Edge",
    "FlatAtom",
    "Literal",
    "Program",
    "Rule",
    "Strata",
    "Term",
    "Var",
    "atom_key",
    "atom_to_gdl",
    "atom_to_prolog",
    "check_stratified",
    "dependency_graph",
    "is_ground",
    "make_program",
    "parse_any",
    "parse_program",
    "parse_prolog",
    "program_to_gdl",
    "stratify",
    "term_key",
    "term_to_gdl",
    "validate_safety",
]
