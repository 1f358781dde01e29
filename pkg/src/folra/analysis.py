"""Static variable analysis: equivalence closures of equalities, the
positive/negative split, generated-variable sets, and the allowedness
check that gates compilation.

Disjunctions are handled on the fly as negated conjunctions inside every
recursion here; the formula tree itself is never rewritten.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .formula import (
    And,
    Atom,
    Eq,
    Exists,
    Formula,
    Not,
    Or,
    Taut,
    Variable,
    free_vars,
    pretty,
)


class Partition:
    """An equivalence on variables; unmentioned variables are singletons.

    Built once from generating pairs via union-find and immutable after
    construction, so snapshots can be shared freely.
    """

    def __init__(self, pairs: Iterable[tuple[Variable, Variable]] = ()):
        parent: dict[Variable, Variable] = {}
        seen: set[Variable] = set()

        def find(v: Variable) -> Variable:
            root = v
            while parent.get(root, root) != root:
                root = parent[root]
            while parent.get(v, v) != v:
                parent[v], v = root, parent[v]
            return root

        for x, y in pairs:
            seen.add(x)
            seen.add(y)
            rx, ry = find(x), find(y)
            if rx != ry:
                if ry.ord < rx.ord:
                    rx, ry = ry, rx
                parent[ry] = rx
        self._root: dict[Variable, Variable] = {v: find(v) for v in seen}
        classes: dict[Variable, list[Variable]] = {}
        for v, root in self._root.items():
            classes.setdefault(root, []).append(v)
        self._classes: tuple[tuple[Variable, ...], ...] = tuple(
            tuple(sorted(members, key=lambda v: v.ord))
            for root, members in sorted(classes.items(), key=lambda kv: kv[0].ord)
            if len(members) > 1
        )

    def find(self, v: Variable) -> Variable:
        return self._root.get(v, v)

    def same(self, x: Variable, y: Variable) -> bool:
        return x == y or self.find(x) == self.find(y)

    def classes(self) -> tuple[tuple[Variable, ...], ...]:
        """The non-singleton classes, each ord-sorted, ordered by least member."""
        return self._classes

    def nontrivial_pairs(self) -> frozenset[tuple[Variable, Variable]]:
        """All ordered pairs (x, y) with x != y and x equivalent to y."""
        out = set()
        for cls in self._classes:
            for x in cls:
                for y in cls:
                    if x != y:
                        out.add((x, y))
        return frozenset(out)

    def members(self) -> frozenset[Variable]:
        return frozenset(v for cls in self._classes for v in cls)

    def merge(self, other: "Partition") -> "Partition":
        """The smallest equivalence containing both (used for conjunctions)."""
        return Partition(tuple(self.nontrivial_pairs()) + tuple(other.nontrivial_pairs()))

    def intersect(self, other: "Partition") -> "Partition":
        """Pairwise class refinement: keep exactly the shared pairs."""
        return Partition(p for p in self.nontrivial_pairs() if other.same(*p))

    def without(self, x: Variable) -> "Partition":
        """Restrict to pairs avoiding x, then re-close; x becomes a singleton."""
        return Partition(p for p in self.nontrivial_pairs() if x not in p)

    def cl(self, xs: Iterable[Variable]) -> frozenset[Variable]:
        """Everything equivalent to some member of `xs`."""
        seed = set(xs)
        out = set(seed)
        for cls in self._classes:
            if seed & set(cls):
                out.update(cls)
        return frozenset(out)

    def refines(self, other: "Partition") -> bool:
        return all(other.same(*p) for p in self.nontrivial_pairs())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return self._classes == other._classes

    def __hash__(self) -> int:
        return hash(self._classes)

    def is_identity(self) -> bool:
        return not self._classes

    def __repr__(self) -> str:
        if not self._classes:
            return "Partition(identity)"
        parts = ", ".join("{" + ", ".join(v.name for v in cls) + "}" for cls in self._classes)
        return f"Partition({parts})"


def equiv_closure(pairs: Iterable[tuple[Variable, Variable]]) -> Partition:
    """The smallest equivalence containing the given pairs."""
    return Partition(pairs)


def cl(e: Partition, xs: Iterable[Variable]) -> frozenset[Variable]:
    return e.cl(xs)


_IDENTITY = Partition()


def eq_vars(f: Formula) -> Partition:
    """Variables forced equal wherever the formula holds."""
    match f:
        case Taut() | Atom():
            return _IDENTITY
        case Eq(x, y):
            return Partition([(x, y)])
        case Not(child):
            return coeq_vars(child)
        case And(left, right):
            return eq_vars(left).merge(eq_vars(right))
        case Or(left, right):
            return eq_vars(left).intersect(eq_vars(right))
        case Exists(var, child):
            return eq_vars(child).without(var)
    raise TypeError(f"not a formula: {f!r}")


def coeq_vars(f: Formula) -> Partition:
    """Variables forced equal wherever the formula fails."""
    match f:
        case Taut() | Atom() | Eq():
            return _IDENTITY
        case Not(child):
            return eq_vars(child)
        case And(left, right):
            return coeq_vars(left).intersect(coeq_vars(right))
        case Or(left, right):
            return coeq_vars(left).merge(coeq_vars(right))
        case Exists(var, child):
            return coeq_vars(child).without(var)
    raise TypeError(f"not a formula: {f!r}")


def is_positive(f: Formula) -> bool:
    match f:
        case Taut() | Atom() | Eq():
            return True
        case Not(child):
            return not is_positive(child)
        case And(left, right):
            return is_positive(left) or is_positive(right)
        case Or(left, right):
            return is_positive(left) and is_positive(right)
        case Exists(_, child):
            return is_positive(child)
    raise TypeError(f"not a formula: {f!r}")


def gen0(f: Formula) -> frozenset[Variable]:
    """Free variables whose values are forced into the active domain."""
    match f:
        case Taut() | Eq():
            return frozenset()
        case Atom(_, args):
            return frozenset(args)
        case Not(child):
            return cogen0(child)
        case And(left, right):
            e = eq_vars(f)
            return e.cl(gen0(left) | gen0(right))
        case Or(left, right):
            return gen0(left) & gen0(right)
        case Exists(var, child):
            return gen0(child) - {var}
    raise TypeError(f"not a formula: {f!r}")


def cogen0(f: Formula) -> frozenset[Variable]:
    """Free variables active-domain-bounded on the complement side."""
    match f:
        case Taut() | Atom() | Eq():
            return frozenset()
        case Not(child):
            return gen0(child)
        case And(left, right):
            return cogen0(left) & cogen0(right)
        case Or(left, right):
            e = coeq_vars(left).merge(coeq_vars(right))
            return e.cl(cogen0(left) | cogen0(right))
        case Exists(var, child):
            return cogen0(child) - {var}
    raise TypeError(f"not a formula: {f!r}")


@dataclass(frozen=True)
class AllowedReport:
    allowed: bool
    fv: frozenset[Variable]
    gen0: frozenset[Variable]
    failing_subformula: Formula | None = None
    reason: str | None = None

    def describe(self) -> str:
        if self.allowed:
            return "allowed"
        assert self.reason is not None
        return self.reason


def is_allowed(f: Formula) -> AllowedReport:
    """Check the allowedness condition, reporting the first violation.

    Quantified subformulas are scanned leftmost-innermost over the
    concrete AST; the free-variable condition on the whole formula is
    checked last (it sits at the root).
    """
    fv = free_vars(f)
    g0 = gen0(f)

    def scan(g: Formula) -> AllowedReport | None:
        match g:
            case Not(child):
                return scan(child)
            case And(left, right) | Or(left, right):
                return scan(left) or scan(right)
            case Exists(var, child):
                bad = scan(child)
                if bad is not None:
                    return bad
                if var not in gen0(child):
                    return AllowedReport(
                        False, fv, g0, failing_subformula=g,
                        reason=(f"quantified variable {var.name!r} is not generated "
                                f"by the body of {pretty(g)}"))
                return None
            case _:
                return None

    bad = scan(f)
    if bad is not None:
        return bad
    if fv != g0:
        missing = ", ".join(sorted(v.name for v in fv - g0)) or "(none)"
        return AllowedReport(
            False, fv, g0, failing_subformula=f,
            reason=f"free variables are not all generated; ungenerated: {missing}")
    return AllowedReport(True, fv, g0)
