"""Brute-force valuation semantics over finite structures.

This module is the correctness oracle: the value of a formula is the
set of all total valuations satisfying it, computed by explicit
enumeration.  Valuation sets together with union, intersection,
complement, cylindrifications and diagonals form the concrete powerset
cylindric algebra; `check_cylindric_axioms` validates its axioms on
sampled data.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .formula import (
    And,
    Atom,
    DatabaseScheme,
    Eq,
    Exists,
    Formula,
    Not,
    Or,
    SchemeError,
    Taut,
    VarUniverse,
    Variable,
    all_vars,
    free_vars,
    parse_scheme_lines,
    Signature,
)

DEFAULT_CAP = 10**6


class SemanticsError(Exception):
    """Base error for evaluation problems."""


class ValuationCapError(SemanticsError):
    """The requested valuation space exceeds the configured cap."""


class DatabaseFormatError(SemanticsError):
    """Malformed database text."""


@dataclass(frozen=True)
class Structure:
    """A finite structure: a non-empty domain plus one relation per symbol."""

    domain: tuple[str, ...]
    interp: dict[str, frozenset[tuple[str, ...]]]

    def __post_init__(self) -> None:
        if not self.domain:
            raise SemanticsError("structure domain must be non-empty")
        if len(set(self.domain)) != len(self.domain):
            raise SemanticsError("structure domain repeats an element")
        dom = set(self.domain)
        for sym, tuples in self.interp.items():
            widths = {len(t) for t in tuples}
            if len(widths) > 1:
                raise SemanticsError(f"relation {sym!r} mixes tuple widths")
            for t in tuples:
                if any(a not in dom for a in t):
                    raise SemanticsError(f"relation {sym!r} contains a value outside the domain")

    def tuples(self, sym: str) -> frozenset[tuple[str, ...]]:
        try:
            return self.interp[sym]
        except KeyError:
            raise SemanticsError(f"symbol {sym!r} is not interpreted") from None

    def with_domain(self, domain: Sequence[str]) -> "Structure":
        """The same relations over a different (usually enlarged) domain."""
        return Structure(tuple(domain), dict(self.interp))


def make_structure(domain: Sequence[str], interp: Mapping[str, Iterable[Sequence[str]]],
                   scheme: DatabaseScheme | None = None) -> Structure:
    frozen = {sym: frozenset(tuple(t) for t in tuples) for sym, tuples in interp.items()}
    if scheme is not None:
        for sym in scheme.symbols():
            frozen.setdefault(sym, frozenset())
            arity = scheme.signature.arity(sym)
            if any(len(t) != arity for t in frozen[sym]):
                raise SemanticsError(f"relation {sym!r} has tuples of the wrong arity")
    return Structure(tuple(domain), frozen)


@dataclass(frozen=True)
class ValuationSet:
    """A set of total valuations, kept with its ambient variables and structure.

    Each valuation is a tuple of domain elements indexed like `vars`.
    """

    vars: tuple[Variable, ...]
    structure: Structure
    vals: frozenset[tuple[str, ...]]

    def index(self, x: Variable) -> int:
        try:
            return self.vars.index(x)
        except ValueError:
            raise SemanticsError(f"variable {x.name!r} is outside this valuation space") from None

    def _check_ambient(self, other: "ValuationSet") -> None:
        if self.vars != other.vars or self.structure.domain != other.structure.domain:
            raise SemanticsError("valuation sets live in different spaces")

    def complement(self) -> "ValuationSet":
        full = _space(self.structure, self.vars)
        return ValuationSet(self.vars, self.structure, full - self.vals)

    def __and__(self, other: "ValuationSet") -> "ValuationSet":
        self._check_ambient(other)
        return ValuationSet(self.vars, self.structure, self.vals & other.vals)

    def __or__(self, other: "ValuationSet") -> "ValuationSet":
        self._check_ambient(other)
        return ValuationSet(self.vars, self.structure, self.vals | other.vals)

    def __le__(self, other: "ValuationSet") -> bool:
        self._check_ambient(other)
        return self.vals <= other.vals

    def __contains__(self, val: tuple[str, ...]) -> bool:
        return val in self.vals

    def __len__(self) -> int:
        return len(self.vals)

    def is_full(self) -> bool:
        return len(self.vals) == len(self.structure.domain) ** len(self.vars)

    def project(self, onto: Iterable[Variable]) -> frozenset[tuple[str, ...]]:
        """The restriction of every valuation to `onto`, in universe order."""
        idx = [self.index(x) for x in sorted(set(onto), key=lambda v: v.ord)]
        return frozenset(tuple(v[i] for i in idx) for v in self.vals)


def _ordered_vars(universe: VarUniverse | Sequence[Variable]) -> tuple[Variable, ...]:
    if isinstance(universe, VarUniverse):
        return universe.snapshot()
    vs = tuple(universe)
    if list(vs) != sorted(vs, key=lambda v: v.ord):
        raise SemanticsError("variables must be given in universe order")
    return vs


_SPACE_CACHE: dict[tuple[tuple[str, ...], int], frozenset[tuple[str, ...]]] = {}


def _space(M: Structure, vars: tuple[Variable, ...]) -> frozenset[tuple[str, ...]]:
    key = (M.domain, len(vars))
    got = _SPACE_CACHE.get(key)
    if got is None:
        got = frozenset(itertools.product(M.domain, repeat=len(vars)))
        _SPACE_CACHE[key] = got
    return got


def check_cap(M: Structure, vars: Sequence[Variable], cap: int) -> None:
    if len(M.domain) ** len(vars) > cap:
        raise ValuationCapError(
            f"{len(M.domain)}^{len(vars)} valuations exceed the cap of {cap}")


def all_valuations(M: Structure, universe: VarUniverse | Sequence[Variable],
                   cap: int = DEFAULT_CAP) -> ValuationSet:
    """Every total valuation of the universe into M's domain."""
    vs = _ordered_vars(universe)
    check_cap(M, vs, cap)
    return ValuationSet(vs, M, _space(M, vs))


def empty_valuations(M: Structure, universe: VarUniverse | Sequence[Variable]) -> ValuationSet:
    return ValuationSet(_ordered_vars(universe), M, frozenset())


def cylindrify(V: ValuationSet, x: Variable) -> ValuationSet:
    """All valuations agreeing with some member of V outside `x`."""
    i = V.index(x)
    dom = V.structure.domain
    vals = frozenset(v[:i] + (m,) + v[i + 1:] for v in V.vals for m in dom)
    return ValuationSet(V.vars, V.structure, vals)


def cylindrify_set(V: ValuationSet, xs: Iterable[Variable]) -> ValuationSet:
    """Iterated cylindrification over `xs`, applied in universe order."""
    for x in sorted(set(xs), key=lambda v: v.ord):
        V = cylindrify(V, x)
    return V


def diagonal(M: Structure, universe: VarUniverse | Sequence[Variable],
             x: Variable, y: Variable, cap: int = DEFAULT_CAP) -> ValuationSet:
    """All valuations sending x and y to the same element."""
    vs = _ordered_vars(universe)
    check_cap(M, vs, cap)
    full = _space(M, vs)
    if x == y:
        return ValuationSet(vs, M, full)
    i, j = vs.index(x), vs.index(y)
    return ValuationSet(vs, M, frozenset(v for v in full if v[i] == v[j]))


def eval_formula(f: Formula, M: Structure, universe: VarUniverse | Sequence[Variable],
                 cap: int = DEFAULT_CAP) -> ValuationSet:
    """The value of `f` in `M`: the set of valuations making `f` true."""
    vs = _ordered_vars(universe)
    check_cap(M, vs, cap)
    missing = all_vars(f) - set(vs)
    if missing:
        names = ", ".join(sorted(v.name for v in missing))
        raise SemanticsError(f"formula uses variables outside the universe: {names}")
    pos = {v: i for i, v in enumerate(vs)}

    def rec(g: Formula) -> ValuationSet:
        match g:
            case Taut():
                return ValuationSet(vs, M, _space(M, vs))
            case Atom(sym, args):
                rel = M.tuples(sym)
                idx = [pos[a] for a in args]
                full = _space(M, vs)
                vals = frozenset(v for v in full if tuple(v[i] for i in idx) in rel)
                return ValuationSet(vs, M, vals)
            case Eq(x, y):
                return diagonal(M, vs, x, y, cap)
            case Not(child):
                return rec(child).complement()
            case And(left, right):
                return rec(left) & rec(right)
            case Or(left, right):
                return rec(left) | rec(right)
            case Exists(var, child):
                return cylindrify(rec(child), var)
        raise TypeError(f"not a formula: {g!r}")

    return rec(f)


def relation_over(f: Formula, M: Structure, onto: Iterable[Variable],
                  cap: int = DEFAULT_CAP) -> frozenset[tuple[str, ...]]:
    """The value of `f` projected onto `onto`, as tuples in universe order.

    Evaluating over the variables occurring in `f` (plus `onto`) suffices:
    the value is a cylinder over every other variable.
    """
    onto = frozenset(onto)
    vs = tuple(sorted(all_vars(f) | onto, key=lambda v: v.ord))
    return eval_formula(f, M, vs, cap).project(onto)


def value_as_relation(f: Formula, M: Structure,
                      cap: int = DEFAULT_CAP) -> frozenset[tuple[str, ...]]:
    """The value of `f` restricted to its free variables."""
    return relation_over(f, M, free_vars(f), cap)


def naive_eval(f: Formula, M: Structure, universe: VarUniverse | Sequence[Variable],
               cap: int = DEFAULT_CAP) -> ValuationSet:
    """Independent per-valuation truth recursion, for cross-checking.

    Deliberately avoids the set-algebra path: each valuation is tested on
    its own, with existential quantification trying every domain element.
    """
    vs = _ordered_vars(universe)
    check_cap(M, vs, cap)
    pos = {v: i for i, v in enumerate(vs)}

    def truth(v: tuple[str, ...], g: Formula) -> bool:
        if isinstance(g, Taut):
            return True
        if isinstance(g, Atom):
            return tuple(v[pos[a]] for a in g.args) in M.tuples(g.sym)
        if isinstance(g, Eq):
            return v[pos[g.x]] == v[pos[g.y]]
        if isinstance(g, Not):
            return not truth(v, g.child)
        if isinstance(g, And):
            return truth(v, g.left) and truth(v, g.right)
        if isinstance(g, Or):
            return truth(v, g.left) or truth(v, g.right)
        if isinstance(g, Exists):
            i = pos[g.var]
            return any(truth(v[:i] + (m,) + v[i + 1:], g.child) for m in M.domain)
        raise TypeError(f"not a formula: {g!r}")

    vals = frozenset(v for v in _space(M, vs) if truth(v, f))
    return ValuationSet(vs, M, vals)


# ---------------------------------------------------------------------------
# Cylindric-algebra axiom checking


@dataclass
class CheckEntry:
    name: str
    cases: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


@dataclass
class CheckReport:
    entries: list[CheckEntry] = field(default_factory=list)

    def entry(self, name: str) -> CheckEntry:
        e = CheckEntry(name)
        self.entries.append(e)
        return e

    @property
    def ok(self) -> bool:
        return all(e.ok for e in self.entries)

    def render(self) -> str:
        lines = []
        for e in self.entries:
            status = "ok" if e.ok else f"FAILED ({len(e.failures)})"
            lines.append(f"{e.name}: {e.cases} cases, {status}")
            for msg in e.failures[:3]:
                lines.append(f"  counterexample: {msg}")
        return "\n".join(lines)


def _sample_subsets(full: Sequence[tuple[str, ...]], count: int,
                    rng: random.Random) -> list[frozenset[tuple[str, ...]]]:
    if len(full) <= 4:
        # Small enough to enumerate the whole powerset.
        out = []
        for mask in range(2 ** len(full)):
            out.append(frozenset(v for i, v in enumerate(full) if mask >> i & 1))
        return out
    densities = [0.0, 0.1, 0.25, 0.5, 0.75, 1.0]
    out = [frozenset(), frozenset(full)]
    while len(out) < count:
        p = rng.choice(densities)
        out.append(frozenset(v for v in full if rng.random() < p))
    return out[:count]


def check_cylindric_axioms(M: Structure, universe: VarUniverse | Sequence[Variable],
                           samples: int = 200, seed: int = 0,
                           cap: int = DEFAULT_CAP) -> CheckReport:
    """Validate axioms 1-8 of the powerset cylindric algebra on M.

    Variable-indexed parts (diagonals, cylindrifications) are checked
    exhaustively over all variables; set-quantified parts run over
    `samples` seeded random subsets of the valuation space.  Failures
    signal an implementation bug, never a property of M.
    """
    vs = _ordered_vars(universe)
    check_cap(M, vs, cap)
    rng = random.Random(seed)
    full_sorted = sorted(_space(M, vs))
    top = all_valuations(M, vs, cap)
    bottom = empty_valuations(M, vs)
    subsets = _sample_subsets(full_sorted, samples, rng)
    sets = [ValuationSet(vs, M, s) for s in subsets]
    report = CheckReport()

    def lift(s: frozenset[tuple[str, ...]]) -> ValuationSet:
        return ValuationSet(vs, M, s)

    e = report.entry("axiom 1 (boolean algebra)")
    for i, V in enumerate(sets):
        W = sets[(i * 7 + 3) % len(sets)]
        U = sets[(i * 13 + 5) % len(sets)]
        e.cases += 1
        checks = [
            (V | W) == (W | V),
            (V & W) == (W & V),
            (V | (W | U)) == ((V | W) | U),
            (V & (W & U)) == ((V & W) & U),
            (V & (W | U)) == ((V & W) | (V & U)),
            (V | V.complement()) == top,
            (V & V.complement()) == bottom,
            (V | bottom) == V,
            (V & top) == V,
        ]
        if not all(checks):
            e.failures.append(f"boolean identity failed on |V|={len(V)}, |W|={len(W)}")

    e = report.entry("axiom 2 (cylindrification of empty set)")
    for x in vs:
        e.cases += 1
        if cylindrify(bottom, x) != bottom:
            e.failures.append(f"C_{x.name}(empty) is non-empty")

    e = report.entry("axiom 3 (V is inside its cylinder)")
    for V in sets:
        for x in vs:
            e.cases += 1
            if (V & cylindrify(V, x)) != V:
                e.failures.append(f"x={x.name}, |V|={len(V)}")

    e = report.entry("axiom 4 (cylinder distribution)")
    for i, V in enumerate(sets):
        W = sets[(i * 11 + 1) % len(sets)]
        for x in vs:
            e.cases += 1
            lhs = cylindrify(V & cylindrify(W, x), x)
            rhs = cylindrify(V, x) & cylindrify(W, x)
            if lhs != rhs:
                e.failures.append(f"x={x.name}, |V|={len(V)}, |W|={len(W)}")

    e = report.entry("axiom 5 (cylindrifications commute)")
    for V in sets:
        for x, y in itertools.combinations(vs, 2):
            e.cases += 1
            if cylindrify(cylindrify(V, y), x) != cylindrify(cylindrify(V, x), y):
                e.failures.append(f"x={x.name}, y={y.name}, |V|={len(V)}")

    e = report.entry("axiom 6 (diagonal of a variable with itself)")
    for x in vs:
        e.cases += 1
        if diagonal(M, vs, x, x, cap) != top:
            e.failures.append(f"D_{x.name}{x.name} is not the full space")

    e = report.entry("axiom 7 (diagonal via a third variable)")
    for x in vs:
        for y in vs:
            for z in vs:
                if x == y or x == z:
                    continue
                e.cases += 1
                lhs = diagonal(M, vs, y, z, cap)
                rhs = cylindrify(diagonal(M, vs, y, x, cap) & diagonal(M, vs, x, z, cap), x)
                if lhs != rhs:
                    e.failures.append(f"x={x.name}, y={y.name}, z={z.name}")

    e = report.entry("axiom 8 (diagonal splits cylinders)")
    for V in sets:
        for x, y in itertools.permutations(vs, 2):
            e.cases += 1
            d = diagonal(M, vs, x, y, cap)
            lhs = cylindrify(d & V, x) & cylindrify(d & V.complement(), x)
            if lhs != bottom:
                e.failures.append(f"x={x.name}, y={y.name}, |V|={len(V)}")

    e = report.entry("complement-of-cylinder lemma (three items)")
    for V in sets:
        for x in vs:
            e.cases += 1
            c = cylindrify(V, x)
            item1 = c.complement() <= V.complement()
            item2 = cylindrify(c.complement(), x) == c.complement()
            item3 = c.complement() <= cylindrify(V.complement(), x)
            if not (item1 and item2 and item3):
                e.failures.append(f"x={x.name}, |V|={len(V)}")

    return report


# ---------------------------------------------------------------------------
# Database text format


def parse_database(text: str, universe: VarUniverse,
                   scheme: DatabaseScheme | None = None) -> tuple[DatabaseScheme, Structure]:
    """Parse the line-based database format.

    Accepts `relation r(x1, ...)` scheme lines, exactly one
    `domain: a b ...` line, and `r: a b` tuple lines; `#` starts a
    comment.  Scheme lines must agree with `scheme` when one is given.
    """
    canon: dict[str, tuple[Variable, ...]] = dict(scheme.canon) if scheme is not None else {}
    domain: tuple[str, ...] | None = None
    tuple_lines: list[tuple[str, tuple[str, ...], str]] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("relation "):
            parse_scheme_lines([line], universe, into=canon)
            continue
        if ":" not in line:
            raise DatabaseFormatError(f"bad database line: {raw.strip()!r}")
        head, _, rest = line.partition(":")
        head = head.strip()
        entries = tuple(rest.split())
        if head == "domain":
            if domain is not None:
                raise DatabaseFormatError("duplicate domain line")
            if not entries:
                raise DatabaseFormatError("domain must be non-empty")
            domain = entries
            continue
        tuple_lines.append((head, entries, raw.strip()))

    if domain is None:
        raise DatabaseFormatError("missing domain line")
    sig = Signature({sym: len(args) for sym, args in canon.items()})
    out_scheme = DatabaseScheme(sig, canon)
    interp: dict[str, set[tuple[str, ...]]] = {sym: set() for sym in canon}
    dom = set(domain)
    for sym, entries, shown in tuple_lines:
        if sym not in canon:
            raise DatabaseFormatError(f"tuple for undeclared relation {sym!r}: {shown!r}")
        if len(entries) != sig.arity(sym):
            raise DatabaseFormatError(
                f"relation {sym!r} expects {sig.arity(sym)} entries: {shown!r}")
        if any(a not in dom for a in entries):
            raise DatabaseFormatError(f"tuple entry outside the domain: {shown!r}")
        interp[sym].add(entries)
    structure = Structure(domain, {sym: frozenset(ts) for sym, ts in interp.items()})
    return out_scheme, structure
