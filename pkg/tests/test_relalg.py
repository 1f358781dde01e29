import random

import pytest

from folra.formula import Taut, VarUniverse, parse_formula, scheme_from_text
from folra.propcheck import GenConfig, _rand_expr, gen_structure
from folra.relalg import (
    Base,
    Dee,
    Diff,
    Join,
    Project,
    Relation,
    RelalgError,
    Rename,
    Select,
    Union,
    base,
    check_embedding_identities,
    difference,
    embed,
    eval_expr,
    expr_scheme,
    formula_of_expr,
    join,
    parse_expr,
    project,
    random_relation,
    rename_attr,
    render_expr,
    select_eq,
    union,
)
from folra.semantics import eval_formula, make_structure, value_as_relation


def _vars(universe, *names):
    return tuple(universe.get(n) for n in names)


def rel(universe, names, rows):
    scheme = tuple(universe.get(n) for n in names)
    return Relation.from_maps(scheme, [dict(zip(scheme, row)) for row in rows])


def test_join_examples(setup_rs):
    universe, scheme = setup_rs
    t1 = rel(universe, ["x1"], [("p",), ("q",)])
    t2 = rel(universe, ["x1", "x2"], [("p", "a")])
    got = join(t1, t2)
    assert got == rel(universe, ["x1", "x2"], [("p", "a")])

    # Disjoint schemes produce the product.
    t3 = rel(universe, ["x2"], [("a",), ("b",)])
    assert len(join(t1, t3)) == len(t1) * len(t3)
    # Joining with the single empty tuple is the identity.
    assert join(t1, Relation.dee()) == t1


def test_project_examples(setup_rs):
    universe, scheme = setup_rs
    t = rel(universe, ["x1", "x2"], [("p", "a"), ("p", "b")])
    assert project(t, t.scheme) == t
    assert project(t, ()) == Relation.dee()
    assert project(Relation.empty(t.scheme), ()) == Relation.empty(())
    x1 = universe.get("x1")
    assert project(t, (x1,)) == rel(universe, ["x1"], [("p",)])
    with pytest.raises(RelalgError):
        project(rel(universe, ["x1"], []), _vars(universe, "x2"))


def test_select_examples(setup_rs):
    universe, scheme = setup_rs
    x1, x2 = _vars(universe, "x1", "x2")
    t = rel(universe, ["x1", "x2"], [("a", "a"), ("a", "b")])
    assert select_eq(t, x1, x1) == t
    assert select_eq(t, x1, x2) == rel(universe, ["x1", "x2"], [("a", "a")])
    assert select_eq(Relation.empty((x1, x2)), x1, x2) == Relation.empty((x1, x2))


def test_rename_examples(setup_rs):
    universe, scheme = setup_rs
    x1, x2 = _vars(universe, "x1", "x2")
    t = rel(universe, ["x1"], [("a",)])
    assert rename_attr(t, x1, x2) == rel(universe, ["x2"], [("a",)])
    assert rename_attr(rename_attr(t, x1, x2), x2, x1) == t
    big = rel(universe, ["x1"], [("a",), ("b",), ("c",)])
    assert len(rename_attr(big, x1, x2)) == len(big)
    with pytest.raises(RelalgError):
        rename_attr(t, x2, x1)


def test_union_difference(setup_rs):
    universe, scheme = setup_rs
    t = rel(universe, ["x1"], [("a",)])
    empty = Relation.empty(t.scheme)
    assert union(t, empty) == t
    assert difference(t, empty) == t
    assert difference(t, t) == empty
    assert len(union(t, rel(universe, ["x1"], [("b",)]))) == 2
    with pytest.raises(RelalgError):
        union(t, Relation.dee())


def test_expr_construction_checks(setup_rs):
    universe, scheme = setup_rs
    x1, x2, x3 = _vars(universe, "x1", "x2", "x3")
    r = base("r", scheme)
    with pytest.raises(RelalgError):
        Union(r, base("s", scheme))
    with pytest.raises(RelalgError):
        Project(frozenset({x2}), r)
    with pytest.raises(RelalgError):
        Select(x1, x2, r)
    with pytest.raises(RelalgError):
        Rename(x1, x1, r)  # target already in the scheme
    with pytest.raises(RelalgError):
        Rename(x3, x2, r)  # renamed variable not in the scheme


def test_eval_expr_clauses(setup_rs):
    universe, scheme = setup_rs
    M = make_structure(["a", "b"], {"r": [("a",)], "s": [("a", "b")]}, scheme)
    assert eval_expr(Dee(), M, scheme) == Relation.dee()
    got = eval_expr(base("r", scheme), M, scheme)
    assert got == rel(universe, ["x1"], [("a",)])


def test_eval_division_expression(setup_division):
    universe, scheme, formula, db = setup_division
    x, y = universe.get("x"), universe.get("y")
    s, r = base("s", scheme), base("r", scheme)
    px = frozenset({x})
    division = Diff(Project(px, s), Project(px, Diff(Join(r, Project(px, s)), s)))
    got = eval_expr(division, db, scheme)
    assert got.rows == {("p",)}


def test_embed_examples(setup_rs):
    universe, scheme = setup_rs
    x1, x2 = _vars(universe, "x1", "x2")
    M = make_structure(["a", "b"], {}, scheme)
    vs = (x1, x2)
    assert len(embed(Relation.dee(), M, vs)) == 4
    assert len(embed(Relation.empty((x1,)), M, vs)) == 0
    t = rel(universe, ["x1"], [("a",)])
    assert embed(t, M, vs).vals == {("a", "a"), ("a", "b")}


def test_embedding_identities_report(setup_rs):
    universe, scheme = setup_rs
    pool = tuple(universe.get(f"x{i}") for i in (1, 2, 3, 4))
    for domain in (["a"], ["a", "b"], ["a", "b", "c"]):
        M = make_structure(domain, {}, scheme)
        report = check_embedding_identities(M, pool, samples=120, seed=11)
        assert report.ok, report.render()


def test_formula_of_expr_goldens(setup_rs):
    universe, scheme = setup_rs
    x1, x2 = _vars(universe, "x1", "x2")
    assert formula_of_expr(Dee(), scheme) == Taut()
    f = formula_of_expr(Project(frozenset({x1}), base("s", scheme)), scheme)
    from folra.formula import Atom, Exists

    assert f == Exists(x2, Atom("s", (x1, x2)))


def test_formula_of_expr_agreement(setup_rs):
    universe, scheme = setup_rs
    pool = [universe.get(f"x{i}") for i in (1, 2, 3, 4)]
    rng = random.Random(100)
    structures = list(gen_structure(GenConfig(seed=3, max_domain=2, case_count=3), scheme))
    for _ in range(200):
        e = _rand_expr(rng, scheme, pool, depth=rng.randint(1, 5))
        f = formula_of_expr(e, scheme)
        for M in structures:
            lhs = embed(eval_expr(e, M, scheme), M, pool)
            rhs = eval_formula(f, M, pool)
            assert lhs == rhs, render_expr(e)


def test_expression_values_ignore_the_domain(setup_rs):
    """Evaluating any expression is insensitive to enlarging the domain."""
    universe, scheme = setup_rs
    pool = [universe.get(f"x{i}") for i in (1, 2, 3, 4)]
    rng = random.Random(42)
    M = make_structure(["a", "b"], {"r": [("a",)], "s": [("b", "a")]}, scheme)
    M2 = M.with_domain(M.domain + ("junk1", "junk2"))
    for _ in range(200):
        e = _rand_expr(rng, scheme, pool, depth=rng.randint(1, 5))
        assert eval_expr(e, M, scheme) == eval_expr(e, M2, scheme)


def test_scheme_cache_matches_recomputation(setup_rs):
    universe, scheme = setup_rs
    pool = [universe.get(f"x{i}") for i in (1, 2, 3, 4)]
    rng = random.Random(17)

    def walk(e):
        assert e.scheme == expr_scheme(e)
        for attr in ("left", "right", "child"):
            if hasattr(e, attr):
                walk(getattr(e, attr))

    for _ in range(200):
        walk(_rand_expr(rng, scheme, pool, depth=rng.randint(1, 5)))


def test_render_parse_roundtrip(setup_rs):
    universe, scheme = setup_rs
    pool = [universe.get(f"x{i}") for i in (1, 2, 3, 4)]
    rng = random.Random(23)
    for _ in range(200):
        e = _rand_expr(rng, scheme, pool, depth=rng.randint(1, 4))
        assert parse_expr(render_expr(e), scheme, universe) == e


def test_render_expr_text_forms(setup_rs):
    universe, scheme = setup_rs
    x1, x2, x3 = _vars(universe, "x1", "x2", "x3")
    r = base("r", scheme)
    s = base("s", scheme)
    assert render_expr(Dee()) == "DEE"
    assert render_expr(Union(r, r)) == "(r union r)"
    assert render_expr(Diff(r, r)) == "(r minus r)"
    assert render_expr(Join(r, s)) == "(r join s)"
    assert render_expr(Project(frozenset({x1}), s)) == "project{x1}(s)"
    assert render_expr(Select(x1, x2, s)) == "select{x1=x2}(s)"
    assert render_expr(Rename(x3, x1, r)) == "rename{x3<-x1}(r)"


def test_random_relation_determinism(setup_rs):
    universe, scheme = setup_rs
    pool = [universe.get(f"x{i}") for i in (1, 2)]
    a = random_relation(random.Random(9), pool, ("a", "b"), 4)
    b = random_relation(random.Random(9), pool, ("a", "b"), 4)
    assert a == b
