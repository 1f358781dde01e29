"""Relations, relational expressions, their evaluation, and the embedding
of relations into valuation sets.

Relation schemes are sets of variables; tuples are stored as vectors in
universe order, which makes set semantics and equality cheap.  Relational
expressions check their formation rules at construction, so a malformed
expression is unrepresentable downstream.
"""

from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .formula import (
    And,
    Atom,
    DatabaseScheme,
    Eq,
    Exists,
    Formula,
    Not,
    Or,
    ParseError,
    Taut,
    VarUniverse,
    Variable,
    exists_block,
    free_vars,
)
from .semantics import (
    CheckReport,
    DEFAULT_CAP,
    Structure,
    ValuationSet,
    all_valuations,
    check_cap,
    cylindrify,
    cylindrify_set,
    diagonal,
    _ordered_vars,
    _space,
)


class RelalgError(Exception):
    """Violation of a relational operator's preconditions."""


def _sorted_vars(vs: Iterable[Variable]) -> tuple[Variable, ...]:
    return tuple(sorted(set(vs), key=lambda v: v.ord))


@dataclass(frozen=True)
class Relation:
    """A finite relation: an ord-sorted scheme and a set of tuples over it."""

    scheme: tuple[Variable, ...]
    rows: frozenset[tuple[str, ...]]

    def __post_init__(self) -> None:
        if self.scheme != _sorted_vars(self.scheme):
            raise RelalgError("relation scheme must be ord-sorted and duplicate-free")
        for row in self.rows:
            if len(row) != len(self.scheme):
                raise RelalgError("tuple width does not match the scheme")

    @classmethod
    def from_maps(cls, scheme: Iterable[Variable],
                  tuples: Iterable[dict[Variable, str]]) -> "Relation":
        sch = _sorted_vars(scheme)
        return cls(sch, frozenset(tuple(t[v] for v in sch) for t in tuples))

    @classmethod
    def empty(cls, scheme: Iterable[Variable]) -> "Relation":
        return cls(_sorted_vars(scheme), frozenset())

    @classmethod
    def dee(cls) -> "Relation":
        """The relation over the empty scheme holding the empty tuple."""
        return cls((), frozenset({()}))

    def index(self, x: Variable) -> int:
        try:
            return self.scheme.index(x)
        except ValueError:
            raise RelalgError(f"variable {x.name!r} is outside the scheme") from None

    def __len__(self) -> int:
        return len(self.rows)

    def restrict_row(self, row: tuple[str, ...], onto: Sequence[Variable]) -> tuple[str, ...]:
        return tuple(row[self.scheme.index(v)] for v in onto)


def join(t1: Relation, t2: Relation) -> Relation:
    """Natural join; on disjoint schemes this is the Cartesian product."""
    sch = _sorted_vars(t1.scheme + t2.scheme)
    common = [v for v in t1.scheme if v in t2.scheme]
    i1 = [t1.scheme.index(v) for v in common]
    i2 = [t2.scheme.index(v) for v in common]
    by_key: dict[tuple[str, ...], list[tuple[str, ...]]] = {}
    for row in t2.rows:
        by_key.setdefault(tuple(row[i] for i in i2), []).append(row)
    out = set()
    pick: list[tuple[int, int]] = []
    for v in sch:
        if v in t1.scheme:
            pick.append((0, t1.scheme.index(v)))
        else:
            pick.append((1, t2.scheme.index(v)))
    for r1 in t1.rows:
        for r2 in by_key.get(tuple(r1[i] for i in i1), ()):
            both = (r1, r2)
            out.add(tuple(both[side][i] for side, i in pick))
    return Relation(sch, frozenset(out))


def project(t: Relation, onto: Iterable[Variable]) -> Relation:
    sub = _sorted_vars(onto)
    if not set(sub) <= set(t.scheme):
        raise RelalgError("projection target is not a subset of the scheme")
    idx = [t.scheme.index(v) for v in sub]
    return Relation(sub, frozenset(tuple(row[i] for i in idx) for row in t.rows))


def select_eq(t: Relation, x: Variable, y: Variable) -> Relation:
    i, j = t.index(x), t.index(y)
    return Relation(t.scheme, frozenset(row for row in t.rows if row[i] == row[j]))


def rename_attr(t: Relation, x: Variable, y: Variable) -> Relation:
    """Re-key column x to the fresh name y."""
    if x not in t.scheme:
        raise RelalgError(f"cannot rename {x.name!r}: not in the scheme")
    if y in t.scheme:
        raise RelalgError(f"cannot rename to {y.name!r}: already in the scheme")
    i = t.index(x)
    new_scheme = _sorted_vars([v for v in t.scheme if v != x] + [y])
    j = new_scheme.index(y)

    def rekey(row: tuple[str, ...]) -> tuple[str, ...]:
        rest = row[:i] + row[i + 1:]
        return rest[:j] + (row[i],) + rest[j:]

    return Relation(new_scheme, frozenset(rekey(row) for row in t.rows))


def union(t1: Relation, t2: Relation) -> Relation:
    if t1.scheme != t2.scheme:
        raise RelalgError("union requires equal schemes")
    return Relation(t1.scheme, t1.rows | t2.rows)


def difference(t1: Relation, t2: Relation) -> Relation:
    if t1.scheme != t2.scheme:
        raise RelalgError("difference requires equal schemes")
    return Relation(t1.scheme, t1.rows - t2.rows)


# ---------------------------------------------------------------------------
# Relational expressions


class RelExpr:
    """Base class of relational expressions; every node caches its scheme."""

    __slots__ = ()
    scheme: frozenset[Variable]


@dataclass(frozen=True)
class Dee(RelExpr):
    scheme: frozenset[Variable] = field(default=frozenset(), init=False)


@dataclass(frozen=True)
class Base(RelExpr):
    sym: str
    scheme: frozenset[Variable]


def base(sym: str, scheme: DatabaseScheme) -> Base:
    return Base(sym, frozenset(scheme.canonical_args(sym)))


@dataclass(frozen=True)
class Union(RelExpr):
    left: RelExpr
    right: RelExpr
    scheme: frozenset[Variable] = field(init=False)

    def __post_init__(self) -> None:
        if self.left.scheme != self.right.scheme:
            raise RelalgError("union requires equal schemes")
        object.__setattr__(self, "scheme", self.left.scheme)


@dataclass(frozen=True)
class Diff(RelExpr):
    left: RelExpr
    right: RelExpr
    scheme: frozenset[Variable] = field(init=False)

    def __post_init__(self) -> None:
        if self.left.scheme != self.right.scheme:
            raise RelalgError("difference requires equal schemes")
        object.__setattr__(self, "scheme", self.left.scheme)


@dataclass(frozen=True)
class Join(RelExpr):
    left: RelExpr
    right: RelExpr
    scheme: frozenset[Variable] = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "scheme", self.left.scheme | self.right.scheme)


@dataclass(frozen=True)
class Project(RelExpr):
    onto: frozenset[Variable]
    child: RelExpr
    scheme: frozenset[Variable] = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "onto", frozenset(self.onto))
        if not self.onto <= self.child.scheme:
            raise RelalgError("projection target is not a subset of the child scheme")
        object.__setattr__(self, "scheme", self.onto)


@dataclass(frozen=True)
class Select(RelExpr):
    x: Variable
    y: Variable
    child: RelExpr
    scheme: frozenset[Variable] = field(init=False)

    def __post_init__(self) -> None:
        if self.x not in self.child.scheme or self.y not in self.child.scheme:
            raise RelalgError("selection variables must lie in the child scheme")
        object.__setattr__(self, "scheme", self.child.scheme)


@dataclass(frozen=True)
class Rename(RelExpr):
    """ρ_{y<-x}: column x re-keyed to y."""

    y: Variable
    x: Variable
    child: RelExpr
    scheme: frozenset[Variable] = field(init=False)

    def __post_init__(self) -> None:
        if self.x not in self.child.scheme:
            raise RelalgError("renamed variable must lie in the child scheme")
        if self.y in self.child.scheme:
            raise RelalgError("rename target must be outside the child scheme")
        object.__setattr__(self, "scheme", (self.child.scheme - {self.x}) | {self.y})


def expr_scheme(e: RelExpr) -> frozenset[Variable]:
    """Recompute the scheme from scratch (the cached value must agree)."""
    match e:
        case Dee():
            return frozenset()
        case Base(_, scheme):
            return scheme
        case Union(left, right) | Diff(left, right):
            return expr_scheme(left)
        case Join(left, right):
            return expr_scheme(left) | expr_scheme(right)
        case Project(onto, _):
            return onto
        case Select(_, _, child):
            return expr_scheme(child)
        case Rename(y, x, child):
            return (expr_scheme(child) - {x}) | {y}
    raise TypeError(f"not a relational expression: {e!r}")


def eval_expr(e: RelExpr, M: Structure, scheme: DatabaseScheme) -> Relation:
    """Evaluate a relational expression bottom-up."""
    match e:
        case Dee():
            return Relation.dee()
        case Base(sym, _):
            args = scheme.canonical_args(sym)
            rel = M.tuples(sym)
            sch = _sorted_vars(args)
            order = [args.index(v) for v in sch]
            return Relation(sch, frozenset(tuple(t[i] for i in order) for t in rel))
        case Union(left, right):
            return union(eval_expr(left, M, scheme), eval_expr(right, M, scheme))
        case Diff(left, right):
            return difference(eval_expr(left, M, scheme), eval_expr(right, M, scheme))
        case Join(left, right):
            return join(eval_expr(left, M, scheme), eval_expr(right, M, scheme))
        case Project(onto, child):
            return project(eval_expr(child, M, scheme), onto)
        case Select(x, y, child):
            return select_eq(eval_expr(child, M, scheme), x, y)
        case Rename(y, x, child):
            return rename_attr(eval_expr(child, M, scheme), x, y)
    raise TypeError(f"not a relational expression: {e!r}")


def embed(t: Relation, M: Structure, universe: VarUniverse | Sequence[Variable],
          cap: int = DEFAULT_CAP) -> ValuationSet:
    """The cylinder over a relation: all valuations restricting into it."""
    vs = _ordered_vars(universe)
    check_cap(M, vs, cap)
    if not set(t.scheme) <= set(vs):
        raise RelalgError("relation scheme is outside the universe")
    idx = [vs.index(v) for v in t.scheme]
    vals = frozenset(v for v in _space(M, vs) if tuple(v[i] for i in idx) in t.rows)
    return ValuationSet(vs, M, vals)


def formula_of_expr(e: RelExpr, scheme: DatabaseScheme) -> Formula:
    """A formula semantically equivalent to `e` (the embedding identities
    read right-to-left)."""
    match e:
        case Dee():
            return Taut()
        case Base(sym, _):
            return scheme.canonical_atom(sym)
        case Union(left, right):
            return Or(formula_of_expr(left, scheme), formula_of_expr(right, scheme))
        case Diff(left, right):
            return And(formula_of_expr(left, scheme), Not(formula_of_expr(right, scheme)))
        case Join(left, right):
            return And(formula_of_expr(left, scheme), formula_of_expr(right, scheme))
        case Project(onto, child):
            f = formula_of_expr(child, scheme)
            return exists_block(child.scheme - onto, f)
        case Select(x, y, child):
            return And(formula_of_expr(child, scheme), Eq(x, y))
        case Rename(y, x, child):
            return Exists(x, And(formula_of_expr(child, scheme), Eq(x, y)))
    raise TypeError(f"not a relational expression: {e!r}")


# ---------------------------------------------------------------------------
# Text form


def render_expr(e: RelExpr) -> str:
    match e:
        case Dee():
            return "DEE"
        case Base(sym, _):
            return sym
        case Union(left, right):
            return f"({render_expr(left)} union {render_expr(right)})"
        case Diff(left, right):
            return f"({render_expr(left)} minus {render_expr(right)})"
        case Join(left, right):
            return f"({render_expr(left)} join {render_expr(right)})"
        case Project(onto, child):
            names = ",".join(v.name for v in _sorted_vars(onto))
            return f"project{{{names}}}({render_expr(child)})"
        case Select(x, y, child):
            return f"select{{{x.name}={y.name}}}({render_expr(child)})"
        case Rename(y, x, child):
            return f"rename{{{y.name}<-{x.name}}}({render_expr(child)})"
    raise TypeError(f"not a relational expression: {e!r}")


_EXPR_TOKEN = re.compile(r"\s*(?:(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<arrow><-)|(?P<punct>[(){},=]))")


def parse_expr(text: str, scheme: DatabaseScheme, universe: VarUniverse) -> RelExpr:
    """Parse the textual expression form produced by `render_expr`."""
    toks: list[tuple[str, str, int]] = []
    pos = 0
    while pos < len(text):
        m = _EXPR_TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            if text[pos:].strip():
                bad = len(text) - len(text[pos:].lstrip())
                raise ParseError(f"unexpected character {text[bad]!r}", bad)
            break
        toks.append((m.lastgroup or "punct", m.group(m.lastgroup), m.start(m.lastgroup)))
        pos = m.end()
    i = 0

    def peek() -> tuple[str, str, int]:
        return toks[i] if i < len(toks) else ("eof", "", len(text))

    def advance() -> tuple[str, str, int]:
        nonlocal i
        tok = peek()
        i += 1
        return tok

    def expect(val: str) -> None:
        kind, value, p = advance()
        if value != val:
            raise ParseError(f"expected {val!r}, found {value or 'end of input'!r}", p)

    def variable() -> Variable:
        kind, value, p = advance()
        if kind != "ident":
            raise ParseError("expected a variable name", p)
        if value not in universe:
            raise ParseError(f"unknown variable {value!r}", p)
        return universe.get(value)

    def expr() -> RelExpr:
        kind, value, p = advance()
        if value == "(":
            left = expr()
            okind, op, op_pos = advance()
            if op not in ("union", "minus", "join"):
                raise ParseError("expected 'union', 'minus' or 'join'", op_pos)
            right = expr()
            expect(")")
            try:
                if op == "union":
                    return Union(left, right)
                if op == "minus":
                    return Diff(left, right)
                return Join(left, right)
            except RelalgError as exc:
                raise ParseError(str(exc), p) from None
        if kind != "ident":
            raise ParseError("expected an expression", p)
        if value == "DEE":
            return Dee()
        if value in ("project", "select", "rename"):
            expect("{")
            try:
                if value == "project":
                    onto = set()
                    if peek()[1] != "}":
                        onto.add(variable())
                        while peek()[1] == ",":
                            advance()
                            onto.add(variable())
                    expect("}")
                    expect("(")
                    child = expr()
                    expect(")")
                    return Project(frozenset(onto), child)
                if value == "select":
                    x = variable()
                    expect("=")
                    y = variable()
                    expect("}")
                    expect("(")
                    child = expr()
                    expect(")")
                    return Select(x, y, child)
                y = variable()
                expect("<-")
                x = variable()
                expect("}")
                expect("(")
                child = expr()
                expect(")")
                return Rename(y, x, child)
            except RelalgError as exc:
                raise ParseError(str(exc), p) from None
        if value not in scheme.signature:
            raise ParseError(f"unknown relation symbol {value!r}", p)
        return base(value, scheme)

    result = expr()
    kind, value, p = peek()
    if kind != "eof":
        raise ParseError(f"unexpected {value!r} after expression", p)
    return result


# ---------------------------------------------------------------------------
# Embedding identity checks


def random_relation(rng: random.Random, scheme_vars: Sequence[Variable],
                    domain: Sequence[str], max_tuples: int) -> Relation:
    sch = _sorted_vars(scheme_vars)
    count = rng.randint(0, max_tuples)
    rows = frozenset(tuple(rng.choice(domain) for _ in sch) for _ in range(count))
    return Relation(sch, rows)


def check_embedding_identities(M: Structure, universe: VarUniverse | Sequence[Variable],
                               samples: int = 100, seed: int = 0,
                               cap: int = DEFAULT_CAP) -> CheckReport:
    """Validate the six identities tying relational operators to the
    cylindric operations through the embedding."""
    vs = _ordered_vars(universe)
    check_cap(M, vs, cap)
    rng = random.Random(seed)
    report = CheckReport()
    dom = M.domain
    max_tuples = min(len(dom) ** 2 + 2, 9)

    entries = {name: report.entry(name) for name in (
        "embedding 1 (union)",
        "embedding 2 (difference)",
        "embedding 3 (join)",
        "embedding 4 (projection)",
        "embedding 5 (selection)",
        "embedding 6 (renaming)",
    )}

    for case in range(samples):
        sub = [v for v in vs if rng.random() < 0.7] or [rng.choice(vs)]
        t1 = random_relation(rng, sub, dom, max_tuples)
        t2 = random_relation(rng, sub, dom, max_tuples)
        sub2 = [v for v in vs if rng.random() < 0.5]
        t3 = random_relation(rng, sub2, dom, max_tuples)

        e = entries["embedding 1 (union)"]
        e.cases += 1
        if embed(union(t1, t2), M, vs, cap) != (embed(t1, M, vs, cap) | embed(t2, M, vs, cap)):
            e.failures.append(f"case {case}")

        e = entries["embedding 2 (difference)"]
        e.cases += 1
        lhs = embed(difference(t1, t2), M, vs, cap)
        rhs = embed(t1, M, vs, cap) & embed(t2, M, vs, cap).complement()
        if lhs != rhs:
            e.failures.append(f"case {case}")

        e = entries["embedding 3 (join)"]
        e.cases += 1
        if embed(join(t1, t3), M, vs, cap) != (embed(t1, M, vs, cap) & embed(t3, M, vs, cap)):
            e.failures.append(f"case {case}")

        e = entries["embedding 4 (projection)"]
        e.cases += 1
        keep = frozenset(v for v in t1.scheme if rng.random() < 0.6)
        lhs = embed(project(t1, keep), M, vs, cap)
        rhs = cylindrify_set(embed(t1, M, vs, cap), set(t1.scheme) - keep)
        if lhs != rhs:
            e.failures.append(f"case {case}")

        if t1.scheme:
            e = entries["embedding 5 (selection)"]
            e.cases += 1
            x = rng.choice(t1.scheme)
            y = rng.choice(t1.scheme)
            lhs = embed(select_eq(t1, x, y), M, vs, cap)
            rhs = embed(t1, M, vs, cap) & diagonal(M, vs, x, y, cap)
            if lhs != rhs:
                e.failures.append(f"case {case}")

        outside = [v for v in vs if v not in t1.scheme]
        if t1.scheme and outside:
            e = entries["embedding 6 (renaming)"]
            e.cases += 1
            x = rng.choice(t1.scheme)
            y = rng.choice(outside)
            lhs = embed(rename_attr(t1, x, y), M, vs, cap)
            rhs = cylindrify(embed(t1, M, vs, cap) & diagonal(M, vs, x, y, cap), x)
            if lhs != rhs:
                e.failures.append(f"case {case}")

    return report
