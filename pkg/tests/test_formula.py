import pytest

from folra.formula import (
    And,
    Atom,
    Eq,
    Exists,
    Not,
    Or,
    ParseError,
    SchemeError,
    Taut,
    VarUniverse,
    all_vars,
    atom_rename,
    complement,
    desugar_or,
    free_vars,
    parse_formula,
    pretty,
    scheme_from_text,
    subst_chain,
)
from folra.propcheck import GenConfig, gen_formula
from folra.semantics import make_structure, relation_over, value_as_relation


def test_parse_basic_shapes(setup_rs):
    universe, scheme = setup_rs
    x, y = universe.get("x1"), universe.get("x2")
    f = parse_formula("exists y. s(x,y)", scheme, universe)
    assert isinstance(f, Exists)
    assert isinstance(f.child, Atom) and f.child.sym == "s"

    assert parse_formula("x1 = x2", scheme, universe) == Eq(x, y)
    assert parse_formula("1", scheme, universe) == Taut()


def test_parse_registers_new_variables(setup_rs):
    universe, scheme = setup_rs
    assert "fresh_name" not in universe
    parse_formula("exists fresh_name. r(fresh_name)", scheme, universe)
    assert "fresh_name" in universe


def test_parse_arity_mismatch(setup_rs):
    universe, scheme = setup_rs
    with pytest.raises(ParseError):
        parse_formula("r(x1, x2)", scheme, universe)
    with pytest.raises(ParseError):
        parse_formula("unknown(x1)", scheme, universe)
    with pytest.raises(ParseError):
        parse_formula("r(x1", scheme, universe)


def test_parse_desugars_connectives(setup_rs):
    universe, scheme = setup_rs
    x = universe.get("x1")
    r = Atom("r", (x,))
    assert parse_formula("r(x1) => r(x1)", scheme, universe) == Or(Not(r), r)
    assert parse_formula("forall x1. r(x1)", scheme, universe) == Not(Exists(x, Not(r)))
    iff = parse_formula("r(x1) <=> r(x1)", scheme, universe)
    assert iff == And(Or(Not(r), r), Or(Not(r), r))


def test_quantifier_scope_extends_right(setup_rs):
    universe, scheme = setup_rs
    f = parse_formula("exists x1. r(x1) & x1 = x2", scheme, universe)
    assert isinstance(f, Exists) and isinstance(f.child, And)
    g = parse_formula("(exists x1. r(x1)) & x1 = x2", scheme, universe)
    assert isinstance(g, And) and isinstance(g.left, Exists)


def test_multi_variable_quantifier(setup_rs):
    universe, scheme = setup_rs
    f = parse_formula("exists x1 x2. s(x1, x2)", scheme, universe)
    x1, x2 = universe.get("x1"), universe.get("x2")
    assert f == Exists(x1, Exists(x2, Atom("s", (x1, x2))))


def test_free_vars_clauses(setup_rs):
    universe, scheme = setup_rs
    x, y, z = universe.get("x1"), universe.get("x2"), universe.get("x3")
    assert free_vars(Taut()) == frozenset()
    assert free_vars(Exists(y, Atom("s", (x, y)))) == {x}
    assert free_vars(And(Atom("r", (x,)), Eq(x, z))) == {x, z}


def _free_vars_chaser(f):
    """Independent definition-chaser: explicit stack walk with scopes."""
    out = set()
    stack = [(f, frozenset())]
    while stack:
        g, bound = stack.pop()
        if isinstance(g, Atom):
            out.update(set(g.args) - bound)
        elif isinstance(g, Eq):
            out.update({g.x, g.y} - bound)
        elif isinstance(g, Not):
            stack.append((g.child, bound))
        elif isinstance(g, (And, Or)):
            stack.append((g.left, bound))
            stack.append((g.right, bound))
        elif isinstance(g, Exists):
            stack.append((g.child, bound | {g.var}))
    return frozenset(out)


def test_free_vars_matches_brute_force(setup_rs):
    universe, scheme = setup_rs
    cfg = GenConfig(seed=41, max_depth=5, max_vars=4, case_count=1000)
    for f in gen_formula(cfg, scheme, universe):
        assert free_vars(f) == _free_vars_chaser(f)


def test_complement(setup_rs):
    universe, scheme = setup_rs
    r = Atom("r", (universe.get("x1"),))
    assert complement(Not(r)) == r
    assert complement(r) == Not(r)
    assert complement(Not(Not(r))) == Not(r)


def test_complement_never_double_negates(setup_rs):
    universe, scheme = setup_rs
    cfg = GenConfig(seed=5, max_depth=4, case_count=300)
    for f in gen_formula(cfg, scheme, universe):
        c = complement(f)
        assert not (isinstance(c, Not) and isinstance(c.child, Not))


def test_subst_chain(setup_rs):
    universe, scheme = setup_rs
    x, y, z = universe.get("x1"), universe.get("x2"), universe.get("x3")
    r = Atom("r", (x,))
    assert subst_chain(r, []) == r
    assert subst_chain(r, [(x, y)]) == Exists(x, And(r, Eq(x, y)))
    two = subst_chain(r, [(x, z), (z, y)])
    assert two == Exists(z, And(Exists(x, And(r, Eq(x, z))), Eq(z, y)))


def test_atom_rename_examples(setup_rs):
    universe, scheme = setup_rs
    x1, x2 = universe.get("x1"), universe.get("x2")
    s = Atom("s", (x1, x2))
    # Swapped targets keep both variables free and mean the swapped atom.
    renamed = atom_rename(s, (x2, x1), universe)
    assert free_vars(renamed) == {x1, x2}
    M = make_structure(["a", "b"], {"r": [], "s": [("a", "b")]}, scheme)
    want = value_as_relation(Atom("s", (x2, x1)), M)
    assert relation_over(renamed, M, {x1, x2}) == want

    # Identity targets are semantically the original atom.
    r = Atom("r", (x1,))
    back = atom_rename(r, (x1,), universe)
    M2 = make_structure(["a", "b"], {"r": [("a",)], "s": []}, scheme)
    assert relation_over(back, M2, {x1}) == value_as_relation(r, M2)


def test_atom_rename_repeated_target(setup_rs):
    universe, scheme = setup_rs
    x1, x2 = universe.get("x1"), universe.get("x2")
    s = Atom("s", (x1, x2))
    collapsed = atom_rename(s, (x1, x1), universe)
    assert free_vars(collapsed) == {x1}
    M = make_structure(["a", "b"], {"r": [], "s": [("a", "a"), ("a", "b")]}, scheme)
    # Only the diagonal pair survives.
    assert relation_over(collapsed, M, {x1}) == frozenset({("a",)})


def test_atom_rename_rejects_repeated_args(setup_rs):
    universe, scheme = setup_rs
    x1 = universe.get("x1")
    from folra.formula import FormulaError

    with pytest.raises(FormulaError):
        atom_rename(Atom("s", (x1, x1)), (x1, x1), universe)


def test_pretty_roundtrip_random(setup_rs):
    universe, scheme = setup_rs
    cfg = GenConfig(seed=77, max_depth=6, max_vars=4, case_count=500)
    for f in gen_formula(cfg, scheme, universe):
        assert parse_formula(pretty(f), scheme, universe) == f


def test_pretty_roundtrip_tricky_shapes(setup_rs):
    universe, scheme = setup_rs
    x, y = universe.get("x1"), universe.get("x2")
    r, s = Atom("r", (x,)), Atom("s", (x, y))
    shapes = [
        And(Exists(x, r), s),
        Or(And(r, Exists(y, s)), r),
        Not(Exists(x, Or(r, s))),
        And(r, And(s, r)),
        And(And(r, s), r),
        Or(r, Or(s, r)),
    ]
    for f in shapes:
        assert parse_formula(pretty(f), scheme, universe) == f


def test_desugar_or(setup_rs):
    universe, scheme = setup_rs
    x = universe.get("x1")
    r = Atom("r", (x,))
    assert desugar_or(Or(r, r)) == Not(And(Not(r), Not(r)))
    assert desugar_or(Exists(x, Or(r, Not(r)))) == \
        Exists(x, Not(And(Not(r), Not(Not(r)))))


def test_scheme_declarations():
    universe = VarUniverse()
    scheme = scheme_from_text("# comment\nrelation r(a)\nrelation s(a, b)\n", universe)
    assert scheme.signature.arity("r") == 1
    assert scheme.canonical_args("s") == (universe.get("a"), universe.get("b"))
    with pytest.raises(SchemeError):
        scheme_from_text("relation r(a, a)", VarUniverse())
    with pytest.raises(SchemeError):
        scheme_from_text("relation r(a)\nrelation r(b)", VarUniverse())


def test_universe_fresh_appends():
    universe = VarUniverse()
    a = universe.add("a")
    z = universe.fresh()
    assert z.name.startswith("_z") and z.ord > a.ord
    assert list(universe)[-1] == z


def test_all_vars(setup_rs):
    universe, scheme = setup_rs
    x, y = universe.get("x1"), universe.get("x2")
    f = Exists(x, Atom("s", (x, y)))
    assert all_vars(f) == {x, y}
    assert free_vars(f) == {y}
