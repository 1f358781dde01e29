import pytest

from folra.formula import DatabaseScheme, Signature, VarUniverse, parse_formula, scheme_from_text
from folra.semantics import make_structure


@pytest.fixture
def setup_rs():
    """Unary r and binary s over canonical variables shared with the
    formula pool x1..x4."""
    universe = VarUniverse()
    scheme = scheme_from_text("relation r(x1)\nrelation s(x1, x2)", universe)
    for name in ("x3", "x4"):
        universe.add(name)
    return universe, scheme


@pytest.fixture
def setup_division():
    """The relational-division example: scheme, formula, and database."""
    universe = VarUniverse()
    scheme = scheme_from_text("relation r(y)\nrelation s(x, y)", universe)
    formula = parse_formula("(exists y. s(x,y)) & !exists y. r(y) & !s(x,y)",
                            scheme, universe)
    db = make_structure(
        ["a", "b", "p", "q"],
        {"r": [("a",), ("b",)], "s": [("p", "a"), ("p", "b"), ("q", "a")]},
        scheme)
    return universe, scheme, formula, db


def structures_for(scheme, specs):
    """Build structures from compact (domain, interp) pairs."""
    return [make_structure(domain, interp, scheme) for domain, interp in specs]
