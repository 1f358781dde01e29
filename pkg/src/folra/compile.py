"""Translation of formulas into relational expressions.

`expr_of_normalized` performs the rule-by-rule translation over strictly
normalized formulas; `compile_allowed` is the end-to-end pipeline
(allowedness check, normalization, translation).  `expr_active` is an
independent second compiler that ranges quantifiers over the active
domain; it agrees with the pipeline on every allowed formula and exists
for differential testing.
"""

from __future__ import annotations

from dataclasses import dataclass

from .formula import (
    And,
    Atom,
    DatabaseScheme,
    Eq,
    Exists,
    Formula,
    Not,
    Or,
    Taut,
    VarUniverse,
    Variable,
    free_vars,
    pretty,
)
from .normalize import is_normalized, normalize_allowed
from .relalg import (
    Base,
    Dee,
    Diff,
    Join,
    Project,
    RelExpr,
    Rename,
    Select,
    Union,
    base,
)
from .semantics import Structure


class CompileError(Exception):
    """Internal translation failure (indicates a non-normalized input)."""


@dataclass(frozen=True)
class CompileResult:
    input: Formula
    normalized: Formula
    expr: RelExpr

    @property
    def scheme(self) -> frozenset[Variable]:
        return self.expr.scheme


def expr_of_normalized(f: Formula, scheme: DatabaseScheme) -> RelExpr:
    """Translate a strictly normalized formula, rule by rule.

    Rule order mirrors the definition: the rename rule is tried before
    the general projection rule, and the difference rule before the
    general join rule.  When the body of the rename rule pins the target
    variable inside the child's scheme, the renaming degenerates into a
    selection followed by a projection (an exact identity of the
    embedding); the plain rename handles the remaining cases.
    """
    if not is_normalized(f, scheme):
        raise CompileError(f"not a normalized formula: {pretty(f)}")
    return _expr(f, scheme)


def _expr(f: Formula, scheme: DatabaseScheme) -> RelExpr:
    match f:
        case Taut():
            return Dee()
        case Atom(sym, _):
            return base(sym, scheme)
        case Exists(x, And(left, Eq(a, b))) if a == x:
            e1 = _expr(left, scheme)
            fv_left = free_vars(left)
            if x in fv_left and b != x and b not in fv_left:
                return Rename(b, x, e1)
            # Target already pinned: select equality, then drop the bound column.
            body_fv = fv_left | {b}
            return Project(frozenset(body_fv - {x}), Select(x, b, e1))
        case Exists(x, body):
            return Project(frozenset(free_vars(body) - {x}), _expr(body, scheme))
        case And(left, Eq(x, y)):
            e1 = _expr(left, scheme)
            fv_left = free_vars(left)
            if x in fv_left and y in fv_left:
                return Select(x, y, e1)
            if x in fv_left:
                return Select(x, y, Join(e1, Rename(y, x, Project(frozenset({x}), e1))))
            if y in fv_left:
                return Select(x, y, Join(e1, Rename(x, y, Project(frozenset({y}), e1))))
            raise CompileError(f"equality {x.name} = {y.name} has no anchor in {pretty(left)}")
        case And(left, Not(neg)):
            return Diff(_expr(left, scheme), _expr(neg, scheme))
        case Or(left, right):
            return Union(_expr(left, scheme), _expr(right, scheme))
        case And(left, right):
            return Join(_expr(left, scheme), _expr(right, scheme))
    raise CompileError(f"no translation rule applies to {pretty(f)}")


def compile_allowed(f: Formula, scheme: DatabaseScheme, universe: VarUniverse) -> CompileResult:
    """Allowedness check, normalization, translation.

    The produced expression's value embeds to the formula's value on
    every database.
    """
    normalized = normalize_allowed(f, scheme, universe)
    expr = expr_of_normalized(normalized, scheme)
    if expr.scheme != free_vars(f):
        raise CompileError(f"expression scheme differs from the free variables of {pretty(f)}")
    return CompileResult(f, normalized, expr)


# ---------------------------------------------------------------------------
# Active domain and the domain-independent translation


def active_domain(M: Structure) -> frozenset[str]:
    """All values occurring in some relation of the database."""
    out: set[str] = set()
    for tuples in M.interp.values():
        for t in tuples:
            out.update(t)
    return frozenset(out)


def _atom_expr(sym: str, args: tuple[Variable, ...], scheme: DatabaseScheme,
               universe: VarUniverse) -> RelExpr:
    """An expression for an arbitrary relation atom (repeats allowed).

    The canonical columns move through fresh names so that repeated or
    swapped argument variables come out as selections plus renames.
    """
    canon = scheme.canonical_args(sym)
    e: RelExpr = base(sym, scheme)
    if args == canon:
        return e
    stand_ins = []
    for c in canon:
        w = universe.fresh()
        e = Rename(w, c, e)
        stand_ins.append(w)
    first: dict[Variable, Variable] = {}
    for w, a in zip(stand_ins, args):
        if a in first:
            e = Select(first[a], w, e)
        else:
            first[a] = w
    e = Project(frozenset(first.values()), e)
    for a, w in first.items():
        e = Rename(a, w, e)
    return e


def active_domain_expr(vars: frozenset[Variable], scheme: DatabaseScheme,
                       universe: VarUniverse) -> RelExpr:
    """An expression whose value is every tuple over `vars` drawn from the
    active domain."""
    if not vars:
        return Dee()
    columns: list[RelExpr] = []
    carrier = universe.fresh()
    for sym in scheme.symbols():
        canon = scheme.canonical_args(sym)
        for c in canon:
            columns.append(Rename(carrier, c, Project(frozenset({c}), base(sym, scheme))))
    if not columns:
        raise CompileError(
            "the active domain is inexpressible without a relation symbol of positive arity")
    pool = columns[0]
    for col in columns[1:]:
        pool = Union(pool, col)
    out: RelExpr | None = None
    for v in sorted(vars, key=lambda u: u.ord):
        copy = Rename(v, carrier, pool)
        out = copy if out is None else Join(out, copy)
    assert out is not None
    return out


def expr_active(f: Formula, scheme: DatabaseScheme, universe: VarUniverse) -> RelExpr:
    """The active-domain translation, defined on every formula.

    Its value embeds to the formula's value whenever the formula is
    domain independent (in particular on every allowed formula).
    """
    match f:
        case Taut():
            return Dee()
        case Atom(sym, args):
            return _atom_expr(sym, args, scheme, universe)
        case Eq(x, y):
            e = active_domain_expr(frozenset({x, y}), scheme, universe)
            return Select(x, y, e)
        case Not(child):
            dom = active_domain_expr(free_vars(child), scheme, universe)
            return Diff(dom, expr_active(child, scheme, universe))
        case And(left, right):
            return Join(expr_active(left, scheme, universe),
                        expr_active(right, scheme, universe))
        case Or(left, right):
            return expr_active(Not(And(Not(left), Not(right))), scheme, universe)
        case Exists(x, child):
            inner = expr_active(child, scheme, universe)
            return Project(frozenset(free_vars(child) - {x}), inner)
    raise TypeError(f"not a formula: {f!r}")
