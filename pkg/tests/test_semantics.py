import itertools
import random

import pytest

from folra.formula import And, Atom, Eq, Exists, Not, Or, Taut, VarUniverse, free_vars
from folra.propcheck import GenConfig, gen_formula, gen_structure
from folra.semantics import (
    SemanticsError,
    Structure,
    ValuationCapError,
    ValuationSet,
    all_valuations,
    check_cylindric_axioms,
    cylindrify,
    cylindrify_set,
    diagonal,
    eval_formula,
    make_structure,
    naive_eval,
    parse_database,
)


def _vars(universe, *names):
    return tuple(universe.get(n) for n in names)


def test_all_valuations_counts(setup_rs):
    universe, scheme = setup_rs
    x, y, z = _vars(universe, "x1", "x2", "x3")
    m1 = make_structure(["a"], {}, scheme)
    m2 = make_structure(["a", "b"], {}, scheme)
    assert all_valuations(m1, (x, y)).vals == {("a", "a")}
    assert len(all_valuations(m2, (x,))) == 2
    assert len(all_valuations(m2, (x, y, z))) == 8


def test_all_valuations_cap():
    universe = VarUniverse()
    vs = tuple(universe.add(f"v{i}") for i in range(4))
    M = Structure(("a", "b", "c"), {})
    with pytest.raises(ValuationCapError):
        all_valuations(M, vs, cap=80)


def test_cylindrify_examples(setup_rs):
    universe, scheme = setup_rs
    x, y = _vars(universe, "x1", "x2")
    M = make_structure(["a", "b"], {}, scheme)
    empty = ValuationSet((x, y), M, frozenset())
    assert cylindrify(empty, x).vals == frozenset()
    full = all_valuations(M, (x, y))
    assert cylindrify(full, x) == full
    v = ValuationSet((x, y), M, frozenset({("a", "a")}))
    assert cylindrify(v, x).vals == {("a", "a"), ("b", "a")}


def test_cylindrify_set(setup_rs):
    universe, scheme = setup_rs
    x, y, z = _vars(universe, "x1", "x2", "x3")
    M = make_structure(["a", "b"], {}, scheme)
    v = ValuationSet((x, y, z), M, frozenset({("a", "b", "a")}))
    assert cylindrify_set(v, ()) == v
    both = cylindrify_set(v, (x, y))
    assert both == cylindrify(cylindrify(v, y), x) == cylindrify(cylindrify(v, x), y)
    assert cylindrify_set(v, (x, y, z)) == all_valuations(M, (x, y, z))


def test_diagonal_examples(setup_rs):
    universe, scheme = setup_rs
    x, y = _vars(universe, "x1", "x2")
    M = make_structure(["a", "b"], {}, scheme)
    assert diagonal(M, (x, y), x, x) == all_valuations(M, (x, y))
    d = diagonal(M, (x, y), x, y)
    assert len(d) == 2
    assert d == diagonal(M, (x, y), y, x)


def test_eval_formula_clauses(setup_rs):
    universe, scheme = setup_rs
    x, y = _vars(universe, "x1", "x2")
    M = make_structure(["a", "b"], {"r": [("a",)], "s": []}, scheme)
    vs = (x, y)
    assert eval_formula(Taut(), M, vs) == all_valuations(M, vs)
    r = eval_formula(Atom("r", (x,)), M, vs)
    assert r.vals == {("a", "a"), ("a", "b")}
    assert eval_formula(Exists(x, Atom("r", (x,))), M, vs) == all_valuations(M, vs)
    M0 = make_structure(["a", "b"], {"r": [], "s": []}, scheme)
    assert eval_formula(Exists(x, Atom("r", (x,))), M0, vs).vals == frozenset()


def test_eval_requires_known_symbols(setup_rs):
    universe, scheme = setup_rs
    x = universe.get("x1")
    M = Structure(("a",), {})
    with pytest.raises(SemanticsError):
        eval_formula(Atom("r", (x,)), M, (x,))


def test_eval_matches_naive_oracle(setup_rs):
    universe, scheme = setup_rs
    cfg = GenConfig(seed=13, max_depth=4, max_vars=3, max_domain=3,
                    case_count=500)
    structures = list(gen_structure(GenConfig(seed=14, max_domain=3, case_count=4), scheme))
    pool = tuple(universe.get(f"x{i}") for i in (1, 2, 3))
    for f in gen_formula(cfg, scheme, universe):
        for M in structures:
            assert eval_formula(f, M, pool) == naive_eval(f, M, pool)


def test_exists_block_is_iterated_cylindrification(setup_rs):
    universe, scheme = setup_rs
    from folra.formula import exists_block

    cfg = GenConfig(seed=23, max_depth=4, max_vars=3, case_count=100)
    pool = tuple(universe.get(f"x{i}") for i in (1, 2, 3))
    M = make_structure(["a", "b"], {"r": [("a",)], "s": [("a", "b")]}, scheme)
    rng = random.Random(5)
    for f in gen_formula(cfg, scheme, universe):
        xs = frozenset(v for v in pool if rng.random() < 0.5)
        lhs = eval_formula(exists_block(xs, f), M, pool)
        rhs = cylindrify_set(eval_formula(f, M, pool), xs)
        assert lhs == rhs


def test_cylinder_invariance_outside_free_vars(setup_rs):
    universe, scheme = setup_rs
    cfg = GenConfig(seed=29, max_depth=4, max_vars=3, case_count=200)
    pool = tuple(universe.get(f"x{i}") for i in (1, 2, 3))
    M = make_structure(["a", "b", "c"], {"r": [("b",)], "s": [("a", "c")]}, scheme)
    for f in gen_formula(cfg, scheme, universe):
        val = eval_formula(f, M, pool)
        for v in pool:
            if v not in free_vars(f):
                assert cylindrify(val, v) == val


def test_agreement_chains_match_agree_outside(setup_rs):
    """The chained definition of agreement over a variable set coincides
    with agreeing outside the set."""
    universe, scheme = setup_rs
    pool = tuple(universe.get(f"x{i}") for i in (1, 2, 3))
    M = make_structure(["a", "b"], {}, scheme)
    space = sorted(all_valuations(M, pool).vals)
    rng = random.Random(7)
    for _ in range(200):
        u = rng.choice(space)
        v = rng.choice(space)
        xs = frozenset(p for p in pool if rng.random() < 0.5)
        agree_outside = all(a == b for a, b, p in zip(u, v, pool) if p not in xs)
        # Chain reachability: change one listed variable at a time.
        reached = {v}
        frontier = [v]
        while frontier:
            w = frontier.pop()
            for i, p in enumerate(pool):
                if p not in xs:
                    continue
                for m in M.domain:
                    nxt = w[:i] + (m,) + w[i + 1:]
                    if nxt not in reached:
                        reached.add(nxt)
                        frontier.append(nxt)
        assert (u in reached) == agree_outside


def test_cylindric_axiom_report(setup_rs):
    universe, scheme = setup_rs
    pool = tuple(universe.get(f"x{i}") for i in (1, 2, 3))
    for domain in (["a"], ["a", "b"], ["a", "b", "c"]):
        M = make_structure(domain, {}, scheme)
        report = check_cylindric_axioms(M, pool, samples=60, seed=3)
        assert report.ok, report.render()
    # The spec'd example identities are named entries of the report.
    names = [e.name for e in report.entries]
    assert any("axiom 3" in n for n in names)
    assert any("axiom 4" in n for n in names)
    assert any("axiom 7" in n for n in names)
    assert any("complement-of-cylinder" in n for n in names)


def test_parse_database_roundtrip(setup_rs):
    universe, scheme = setup_rs
    text = """
    # database for tests
    relation r(x1)
    relation s(x1, x2)
    domain: a b p
    r: a
    s: p a
    s: p b
    """
    got_scheme, M = parse_database(text, VarUniverse())
    assert got_scheme.signature.arity("s") == 2
    assert M.domain == ("a", "b", "p")
    assert M.interp["s"] == {("p", "a"), ("p", "b")}
    assert M.interp["r"] == {("a",)}


def test_parse_database_errors():
    from folra.semantics import DatabaseFormatError

    u = VarUniverse()
    with pytest.raises(DatabaseFormatError):
        parse_database("relation r(x)\nr: a", u)  # no domain
    with pytest.raises(DatabaseFormatError):
        parse_database("relation r(x)\ndomain: a\nr: a b", u)  # arity
    with pytest.raises(DatabaseFormatError):
        parse_database("relation r(x)\ndomain: a\nr: z", u)  # outside domain
    with pytest.raises(DatabaseFormatError):
        parse_database("relation r(x)\ndomain: a\ndomain: b", u)  # duplicate


def test_structure_validation():
    with pytest.raises(SemanticsError):
        Structure((), {})
    with pytest.raises(SemanticsError):
        Structure(("a",), {"r": frozenset({("z",)})})


def test_arity_zero_relations():
    universe = VarUniverse()
    from folra.formula import scheme_from_text

    scheme = scheme_from_text("relation p()", universe)
    x = universe.add("x")
    M_true = make_structure(["a"], {"p": [()]}, scheme)
    M_false = make_structure(["a"], {"p": []}, scheme)
    atom = Atom("p", ())
    assert eval_formula(atom, M_true, (x,)).is_full()
    assert len(eval_formula(atom, M_false, (x,))) == 0
