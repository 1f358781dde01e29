"""Normalization of allowed formulas.

`norm` rewrites a formula relative to a same-free-variables normalized
formula (usually its generator) into the inductive family that
translates rule-by-rule into relational algebra.  The rewriting is
interleaved with `cleanup`, a set of semantics-exact simplifications
(tautology rules, dead quantifiers, conjunct absorption, one-point
equality elimination, equality re-anchoring); every cleanup rule is an
identity of the underlying powerset cylindric algebra, so values are
preserved on every structure.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence

from .analysis import AllowedReport, Partition, eq_vars, is_allowed
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
    atom_rename,
    complement,
    desugar_or,
    exists_block,
    free_vars,
    pretty,
)


class NormalizationError(Exception):
    """The normalization pipeline could not produce a normalized result."""


class NotAllowedError(Exception):
    """Raised when compiling a formula that fails the allowedness check."""

    def __init__(self, report: AllowedReport):
        super().__init__(report.describe())
        self.report = report


# ---------------------------------------------------------------------------
# Minimal representations and the equality-chain connective


def minimal_representation(e: Partition) -> tuple[tuple[Variable, Variable], ...]:
    """A canonical minimal pair set whose closure is `e`.

    Each non-singleton class {v1 < ... < vk} contributes the chain
    (v1,v2), ..., (v(k-1),vk); removing any pair breaks the closure.
    """
    pairs: list[tuple[Variable, Variable]] = []
    for cls in e.classes():
        pairs.extend(zip(cls, cls[1:]))
    return tuple(pairs)


def star_or(f: Formula, g: Formula) -> Formula:
    """Disjunction after projecting each side onto the shared variables."""
    x, y = free_vars(f), free_vars(g)
    return Or(exists_block(x - y, f), exists_block(y - x, g))


def conj_eq(f1: Formula, f2: Formula) -> Formula:
    """The equality chain a conjunction enforces beyond its generators.

    Takes the pair-set difference of the two equivalence closures,
    re-closes it, and emits the canonical chain of its minimal
    representation (the tautology when empty).
    """
    whole = eq_vars(And(f1, f2))
    via_gens = eq_vars(And(_gen_raw(f1), _gen_raw(f2)))
    pairs = whole.nontrivial_pairs() - via_gens.nontrivial_pairs()
    rep = minimal_representation(Partition(pairs))
    if not rep:
        return Taut()
    chain: Formula = Eq(*rep[0])
    for x, y in rep[1:]:
        chain = And(chain, Eq(x, y))
    return chain


# ---------------------------------------------------------------------------
# Generators and cogenerators


@lru_cache(maxsize=None)
def _gen_raw(f: Formula) -> Formula:
    match f:
        case Taut() | Eq():
            return Taut()
        case Atom():
            return f
        case Not(child):
            return _cogen_raw(child)
        case And(left, right):
            return And(And(_gen_raw(left), _gen_raw(right)), conj_eq(left, right))
        case Or(left, right):
            return _cogen_raw(And(Not(left), Not(right)))
        case Exists(var, child):
            return Exists(var, _gen_raw(child))
    raise TypeError(f"not a formula: {f!r}")


@lru_cache(maxsize=None)
def _cogen_raw(f: Formula) -> Formula:
    match f:
        case Taut() | Atom() | Eq():
            return Taut()
        case Not(child):
            return _gen_raw(child)
        case And(left, right):
            return star_or(_cogen_raw(left), _cogen_raw(right))
        case Or(left, right):
            return _gen_raw(And(Not(left), Not(right)))
        case Exists(var, child):
            return Exists(var, _cogen_raw(child))
    raise TypeError(f"not a formula: {f!r}")


def simplify_tautology(f: Formula) -> Formula:
    """Bottom-up application of the three tautology rules."""
    match f:
        case Taut() | Atom() | Eq():
            return f
        case Not(child):
            return Not(simplify_tautology(child))
        case And(left, right):
            l, r = simplify_tautology(left), simplify_tautology(right)
            if isinstance(l, Taut):
                return r
            if isinstance(r, Taut):
                return l
            return And(l, r)
        case Or(left, right):
            l, r = simplify_tautology(left), simplify_tautology(right)
            if isinstance(l, Taut) or isinstance(r, Taut):
                return Taut()
            return Or(l, r)
        case Exists(var, child):
            c = simplify_tautology(child)
            if isinstance(c, Taut):
                return c
            return Exists(var, c)
    raise TypeError(f"not a formula: {f!r}")


def gen(f: Formula) -> Formula:
    """The generator: a formula bounding the value from above."""
    return simplify_tautology(_gen_raw(f))


def cogen(f: Formula) -> Formula:
    """The cogenerator: a formula bounding the complement from above."""
    return simplify_tautology(_cogen_raw(f))


def align(f: Formula, g: Formula) -> Formula:
    """Pad `f` with a cylinder of `g` so their free variables agree."""
    fv_f, fv_g = free_vars(f), free_vars(g)
    if not fv_f <= fv_g:
        raise NormalizationError("alignment requires FV(f) to lie inside FV(g)")
    if fv_f == fv_g:
        return f
    return And(f, exists_block(fv_f, g))


# ---------------------------------------------------------------------------
# Normalized-form predicate


def is_normalized(f: Formula, scheme: DatabaseScheme) -> bool:
    """Membership in the inductive family that `expr` translates directly."""
    match f:
        case Taut():
            return True
        case Atom(sym, args):
            return sym in scheme.signature and args == scheme.canonical_args(sym)
        case And(left, Eq(x, _)):
            return x in free_vars(left) and is_normalized(left, scheme)
        case And(left, Not(neg)):
            return (free_vars(left) == free_vars(neg)
                    and is_normalized(left, scheme) and is_normalized(neg, scheme))
        case Or(left, right):
            return (free_vars(left) == free_vars(right)
                    and is_normalized(left, scheme) and is_normalized(right, scheme))
        case And(left, right):
            return is_normalized(left, scheme) and is_normalized(right, scheme)
        case Exists(_, child):
            return is_normalized(child, scheme)
        case _:
            return False


# ---------------------------------------------------------------------------
# Exact-rewrite cleanup


def _short_atom(atom: Atom, scheme: DatabaseScheme, universe: VarUniverse) -> Formula:
    """A normalized formula denoting the atom, built over the canonical atom.

    Canonical argument positions that must change are bound and equated
    with their targets; when a target collides with a bound canonical
    variable the fresh-variable two-phase renaming is used instead.
    """
    canon = scheme.canonical_args(atom.sym)
    targets = atom.args
    if targets == canon:
        return atom
    changed = [i for i, (c, t) in enumerate(zip(canon, targets)) if c != t]
    bound = {canon[i] for i in changed}
    if all(t not in bound for t in targets):
        body: Formula = Atom(atom.sym, canon)
        for i in changed:
            body = And(body, Eq(canon[i], targets[i]))
        return exists_block(bound, body)
    return atom_rename(Atom(atom.sym, canon), targets, universe)


def _flatten(f: Formula) -> list[Formula]:
    """Conjunct list of an already-cleaned tree.

    Conjunctions whose right side is a negation are kept opaque: they
    carry a free-variable pairing that reordering must not disturb.
    """
    if isinstance(f, And) and not isinstance(f.right, Not):
        return _flatten(f.left) + _flatten(f.right)
    return [f]


def _rebuild(conjs: Sequence[Formula]) -> Formula:
    out = conjs[0]
    for c in conjs[1:]:
        out = And(out, c)
    return out


def _strip_block(f: Formula) -> tuple[list[Variable], Formula]:
    bound: list[Variable] = []
    while isinstance(f, Exists):
        bound.append(f.var)
        f = f.child
    return bound, f


def _absorb(conjs: list[Formula]) -> list[Formula]:
    """Drop conjuncts subsumed by the rest.

    A duplicate conjunct is dropped outright.  An existential block over a
    conjunction splits into parts already present alongside it and a
    remainder not using the bound variables; the parts are redundant
    there, so the block collapses to the remainder.
    """
    changed = True
    while changed:
        changed = False
        for i, c in enumerate(conjs):
            rest = conjs[:i] + conjs[i + 1:]
            rest_set = set(rest)
            bound, core = _strip_block(c)
            if not bound:
                if c in rest_set:
                    conjs = rest
                    changed = True
                    break
                continue
            parts = _flatten(core)
            matched = [q for q in parts if q in rest_set]
            if not matched:
                continue
            beta = [q for q in parts if q not in rest_set]
            if any(set(bound) & free_vars(q) for q in beta):
                continue
            repl = beta if beta else [Taut()]
            conjs = conjs[:i] + repl + conjs[i + 1:]
            changed = True
            break
    return [c for c in conjs if not isinstance(c, Taut)]


def _anchored(conjs: list[Formula]) -> list[Formula]:
    """Order equalities after the rest so each one's left variable is
    already free in the accumulated prefix, swapping sides when needed."""
    non_eq = [c for c in conjs if not isinstance(c, Eq)]
    eqs = [c for c in conjs if isinstance(c, Eq)]
    if not eqs:
        return conjs
    out = list(non_eq)
    fv: set[Variable] = set()
    for c in non_eq:
        fv |= free_vars(c)
    pending = list(eqs)
    while pending:
        for idx, e in enumerate(pending):
            if e.x in fv:
                pick = e
            elif e.y in fv:
                pick = Eq(e.y, e.x)
            else:
                continue
            out.append(pick)
            fv |= {pick.x, pick.y}
            del pending[idx]
            break
        else:
            out.extend(pending)
            break
    return out


def cleanup(f: Formula, scheme: DatabaseScheme, universe: VarUniverse) -> Formula:
    """Apply the exact simplification rules bottom-up.

    Every rule preserves the value on every structure; on the outputs of
    `norm` over allowed inputs the result is strictly normalized.
    """
    memo: dict[Formula, Formula] = {}

    def go(g: Formula) -> Formula:
        got = memo.get(g)
        if got is None:
            got = node(g)
            memo[g] = got
        return got

    def node(g: Formula) -> Formula:
        match g:
            case Taut() | Eq():
                return g
            case Atom():
                return _short_atom(g, scheme, universe)
            case Not(child):
                c = go(child)
                if isinstance(c, Not):
                    return c.child
                return Not(c)
            case Or(left, right):
                l, r = go(left), go(right)
                if isinstance(l, Taut) or isinstance(r, Taut):
                    return Taut()
                if l == r:
                    return l
                return Or(l, r)
            case And(left, right):
                l, r = go(left), go(right)
                if isinstance(r, Not):
                    if isinstance(l, Taut) and free_vars(r.child):
                        return r
                    return And(l, r)
                if isinstance(l, Taut):
                    return r
                if isinstance(r, Taut):
                    return l
                return pipeline(_flatten(l) + _flatten(r))
            case Exists(var, child):
                return exists_node(var, go(child))
        raise TypeError(f"not a formula: {g!r}")

    def pipeline(conjs: list[Formula]) -> Formula:
        # Reflexive equalities are tautologous; inside allowed formulas
        # their variables are always generated elsewhere, so no free
        # variable is lost by dropping them.
        conjs = [c for c in conjs
                 if not isinstance(c, Taut) and not (isinstance(c, Eq) and c.x == c.y)]
        if not conjs:
            return Taut()
        seen: set[Formula] = set()
        deduped = []
        for c in conjs:
            if c not in seen:
                seen.add(c)
                deduped.append(c)
        conjs = _absorb(deduped)
        conjs = [c for c in conjs if not isinstance(c, Taut)]
        if not conjs:
            return Taut()
        conjs = _anchored(conjs)
        if len(conjs) == 1:
            return conjs[0]
        return _rebuild(conjs)

    def exists_node(x: Variable, body: Formula) -> Formula:
        if isinstance(body, Taut):
            return Taut()
        if x not in free_vars(body):
            return body
        conjs = _flatten(body)
        keep_eq: Eq | None = None
        rest: list[Formula] = []
        outside: list[Formula] = []
        for c in conjs:
            if isinstance(c, Eq) and x in (c.x, c.y):
                other = c.y if c.x == x else c.x
                if other == x:
                    continue
                if keep_eq is None:
                    keep_eq = Eq(x, other)
                else:
                    outside.append(Eq(keep_eq.y, other))
            elif x in free_vars(c):
                rest.append(c)
            else:
                outside.append(c)
        if rest:
            inner = _rebuild(rest + [keep_eq]) if keep_eq is not None else _rebuild(rest)
            core: Formula = Exists(x, inner)
        else:
            core = Taut()
        if not outside:
            return core
        return pipeline(_flatten(core) + outside)

    return go(f)


# ---------------------------------------------------------------------------
# Normalization


def norm(f: Formula, psi: Formula, scheme: DatabaseScheme, universe: VarUniverse) -> Formula:
    """Normalize `f` using the normalized, same-free-variables `psi`.

    Disjunctions in `f` are first rewritten as negated conjunctions;
    results are cleaned at each step, mirroring the interleaved
    simplification of the worked derivations.
    """
    return _norm(desugar_or(f), psi, scheme, universe)


def _norm(f: Formula, psi: Formula, scheme: DatabaseScheme, universe: VarUniverse) -> Formula:
    if free_vars(f) != free_vars(psi):
        raise NormalizationError(
            f"norm requires matching free variables; got {pretty(f)} against {pretty(psi)}")

    def cl(g: Formula) -> Formula:
        return cleanup(g, scheme, universe)

    match f:
        case Taut():
            # Not covered by the written rules; psi itself satisfies the
            # normalization contract (the value within psi is unchanged).
            return psi
        case Atom():
            return cl(_short_atom(f, scheme, universe))
        case Eq():
            return cl(And(psi, f))
        case Not(child):
            return complement(_norm(child, psi, scheme, universe))
        case And(left, right):
            psi1 = cl(exists_block(free_vars(psi) - free_vars(left), psi))
            psi2 = cl(exists_block(free_vars(psi) - free_vars(right), psi))
            a1 = _norm(left, psi1, scheme, universe)
            a2 = _norm(right, psi2, scheme, universe)
            neg1, neg2 = isinstance(a1, Not), isinstance(a2, Not)
            out: Formula
            if not neg1 and not neg2:
                out = And(a1, a2)
            elif not neg1:
                out = And(align(a1, psi), Not(align(complement(a2), psi)))
            elif not neg2:
                out = And(align(a2, psi), Not(align(complement(a1), psi)))
            else:
                out = Not(Or(align(complement(a1), psi), align(complement(a2), psi)))
            return cl(out)
        case Exists(var, child):
            psi1 = cl(gen(child))
            block = free_vars(psi1) - {var}
            chi = cl(And(exists_block(block, psi1), psi))
            if free_vars(chi) != free_vars(child):
                raise NormalizationError(
                    f"projection of the generator lost variables at {pretty(f)}")
            return cl(Exists(var, _norm(child, chi, scheme, universe)))
    raise TypeError(f"not a formula: {f!r}")


def normalize_allowed(f: Formula, scheme: DatabaseScheme, universe: VarUniverse) -> Formula:
    """Normalize an allowed formula using its generator.

    The result is semantically equal to `f`, strictly normalized, and has
    the same free variables.  A top-level negation (which arises exactly
    for negative allowed formulas, all of them closed) is wrapped into a
    conjunction with the tautology to stay inside the normalized family.
    """
    report = is_allowed(f)
    if not report.allowed:
        raise NotAllowedError(report)
    fd = desugar_or(f)
    psi0 = cleanup(gen(fd), scheme, universe)
    if free_vars(psi0) != free_vars(fd):
        raise NormalizationError(
            "generator free variables disagree with the formula; "
            f"got {pretty(psi0)} for {pretty(f)}")
    out = _norm(fd, psi0, scheme, universe)
    if isinstance(out, Not):
        out = And(Taut(), out)
    if free_vars(out) != free_vars(f):
        raise NormalizationError(f"normalization changed the free variables of {pretty(f)}")
    if not is_normalized(out, scheme):
        raise NormalizationError(
            f"normalization produced a non-normalized result for {pretty(f)}: {pretty(out)}")
    return out
