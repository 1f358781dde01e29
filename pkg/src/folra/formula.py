"""First-order formulas over a relational scheme.

Variables live in a shared, linearly ordered universe.  Formulas are
immutable trees built from the tautology constant, relation atoms,
equalities, negation, conjunction, disjunction and existential
quantification.  Implication, equivalence and universal quantification
exist only as parser sugar and never appear in the AST.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence


class FormulaError(Exception):
    """Base error for formula construction and parsing."""


class ParseError(FormulaError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class SchemeError(FormulaError):
    """Invalid scheme declaration or symbol/arity mismatch."""


# ---------------------------------------------------------------------------
# Variables and their universe


@dataclass(frozen=True, slots=True)
class Variable:
    """A named variable with its position in the universe's total order."""

    name: str
    ord: int

    def __repr__(self) -> str:
        return self.name

    def __lt__(self, other: "Variable") -> bool:
        return self.ord < other.ord


class VarUniverse:
    """The ordered variable universe.

    Iteration order equals the linear order; freshly allocated variables
    are appended at the end, so the order of existing variables never
    changes.
    """

    def __init__(self) -> None:
        self._vars: list[Variable] = []
        self._by_name: dict[str, Variable] = {}
        self._fresh_counter = 0

    def add(self, name: str) -> Variable:
        """Return the variable called `name`, creating it if needed."""
        v = self._by_name.get(name)
        if v is None:
            v = Variable(name, len(self._vars))
            self._vars.append(v)
            self._by_name[name] = v
        return v

    def get(self, name: str) -> Variable:
        try:
            return self._by_name[name]
        except KeyError:
            raise SchemeError(f"unknown variable {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def fresh(self) -> Variable:
        """Allocate a new variable named `_z<n>`, appended at the end."""
        while True:
            name = f"_z{self._fresh_counter}"
            self._fresh_counter += 1
            if name not in self._by_name:
                return self.add(name)

    def snapshot(self) -> tuple[Variable, ...]:
        return tuple(self._vars)

    def __iter__(self) -> Iterator[Variable]:
        return iter(self._vars)

    def __len__(self) -> int:
        return len(self._vars)


# ---------------------------------------------------------------------------
# Signatures and database schemes


@dataclass(frozen=True)
class Signature:
    """Relation symbols with their arities."""

    rels: dict[str, int]

    def arity(self, sym: str) -> int:
        try:
            return self.rels[sym]
        except KeyError:
            raise SchemeError(f"unknown relation symbol {sym!r}") from None

    def __contains__(self, sym: str) -> bool:
        return sym in self.rels

    def symbols(self) -> tuple[str, ...]:
        return tuple(sorted(self.rels))


class DatabaseScheme:
    """A signature plus one canonical atom per relation symbol.

    The canonical atom fixes the relation scheme of each base relation:
    its argument variables are pairwise distinct and serve as the column
    names of the stored relation.
    """

    def __init__(self, signature: Signature, canon: dict[str, tuple[Variable, ...]]):
        for sym, arity in signature.rels.items():
            if sym not in canon:
                raise SchemeError(f"no canonical atom declared for {sym!r}")
            args = canon[sym]
            if len(args) != arity:
                raise SchemeError(f"canonical atom for {sym!r} has {len(args)} arguments, arity is {arity}")
            if len(set(args)) != len(args):
                raise SchemeError(f"canonical atom for {sym!r} repeats a variable")
        extra = set(canon) - set(signature.rels)
        if extra:
            raise SchemeError(f"canonical atoms for undeclared symbols: {sorted(extra)}")
        self.signature = signature
        self.canon = dict(canon)

    def canonical_args(self, sym: str) -> tuple[Variable, ...]:
        try:
            return self.canon[sym]
        except KeyError:
            raise SchemeError(f"unknown relation symbol {sym!r}") from None

    def canonical_atom(self, sym: str) -> "Atom":
        return Atom(sym, self.canonical_args(sym))

    def symbols(self) -> tuple[str, ...]:
        return self.signature.symbols()


_SCHEME_LINE = re.compile(r"^relation\s+([A-Za-z_][A-Za-z0-9_]*)\s*\(\s*([^)]*)\)\s*$")


def parse_scheme_lines(lines: Iterable[str], universe: VarUniverse,
                       into: dict[str, tuple[Variable, ...]] | None = None) -> dict[str, tuple[Variable, ...]]:
    """Parse `relation r(x1, x2)` declarations into a canonical-atom map.

    Re-declaring a symbol differently is an error; re-declaring it
    identically is accepted (first definition wins).
    """
    canon = into if into is not None else {}
    for raw in lines:
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _SCHEME_LINE.match(line)
        if m is None:
            raise SchemeError(f"bad scheme line: {raw.strip()!r}")
        sym, argtext = m.group(1), m.group(2).strip()
        names = [a for a in re.split(r"[\s,]+", argtext) if a] if argtext else []
        args = tuple(universe.add(n) for n in names)
        if len(set(args)) != len(args):
            raise SchemeError(f"canonical atom for {sym!r} repeats a variable")
        if sym in canon:
            if canon[sym] != args:
                raise SchemeError(f"conflicting declarations for relation {sym!r}")
            continue
        canon[sym] = args
    return canon


def scheme_from_text(text: str, universe: VarUniverse) -> DatabaseScheme:
    canon = parse_scheme_lines(text.splitlines(), universe)
    sig = Signature({sym: len(args) for sym, args in canon.items()})
    return DatabaseScheme(sig, canon)


# ---------------------------------------------------------------------------
# Formula AST


class Formula:
    """Base class of all formula nodes."""

    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Taut(Formula):
    """The tautology constant."""

    def __repr__(self) -> str:
        return "1"


@dataclass(frozen=True, slots=True)
class Atom(Formula):
    sym: str
    args: tuple[Variable, ...]

    def __repr__(self) -> str:
        return f"{self.sym}({', '.join(v.name for v in self.args)})"


@dataclass(frozen=True, slots=True)
class Eq(Formula):
    x: Variable
    y: Variable

    def __repr__(self) -> str:
        return f"{self.x.name} = {self.y.name}"


@dataclass(frozen=True, slots=True)
class Not(Formula):
    child: Formula


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Exists(Formula):
    var: Variable
    child: Formula


def check_atom(sym: str, args: Sequence[Variable], scheme: DatabaseScheme) -> Atom:
    arity = scheme.signature.arity(sym)
    if len(args) != arity:
        raise SchemeError(f"relation {sym!r} expects {arity} arguments, got {len(args)}")
    return Atom(sym, tuple(args))


@lru_cache(maxsize=None)
def free_vars(f: Formula) -> frozenset[Variable]:
    """The free variables of `f`."""
    match f:
        case Taut():
            return frozenset()
        case Atom(_, args):
            return frozenset(args)
        case Eq(x, y):
            return frozenset((x, y))
        case Not(child):
            return free_vars(child)
        case And(left, right) | Or(left, right):
            return free_vars(left) | free_vars(right)
        case Exists(var, child):
            return free_vars(child) - {var}
    raise TypeError(f"not a formula: {f!r}")


@lru_cache(maxsize=None)
def all_vars(f: Formula) -> frozenset[Variable]:
    """Every variable occurring in `f`, free or bound."""
    match f:
        case Taut():
            return frozenset()
        case Atom(_, args):
            return frozenset(args)
        case Eq(x, y):
            return frozenset((x, y))
        case Not(child):
            return all_vars(child)
        case And(left, right) | Or(left, right):
            return all_vars(left) | all_vars(right)
        case Exists(var, child):
            return all_vars(child) | {var}
    raise TypeError(f"not a formula: {f!r}")


def complement(f: Formula) -> Formula:
    """Strip one negation if present, otherwise negate."""
    if isinstance(f, Not):
        return f.child
    return Not(f)


def exists_block(xs: Iterable[Variable], f: Formula) -> Formula:
    """(∃X)f with the block nested in the universe order, outermost first."""
    for x in sorted(set(xs), key=lambda v: v.ord, reverse=True):
        f = Exists(x, f)
    return f


def subst_chain(f: Formula, pairs: Sequence[tuple[Variable, Variable]]) -> Formula:
    """Iterated substitution formula: each (x, y) step wraps (∃x)(f ∧ x = y)."""
    for x, y in pairs:
        f = Exists(x, And(f, Eq(x, y)))
    return f


def atom_rename(r_atom: Atom, targets: Sequence[Variable], universe: VarUniverse) -> Formula:
    """Rename a relation atom with pairwise-distinct arguments onto `targets`.

    Goes through fresh intermediate variables so that repeated or swapped
    targets are handled without capture; the result's free variables are
    exactly the targets.
    """
    args = r_atom.args
    if len(set(args)) != len(args):
        raise FormulaError("atom_rename requires pairwise-distinct atom arguments")
    if len(targets) != len(args):
        raise FormulaError(f"expected {len(args)} targets, got {len(targets)}")
    fresh = [universe.fresh() for _ in args]
    pairs = list(zip(args, fresh)) + list(zip(fresh, targets))
    return subst_chain(r_atom, pairs)


def desugar_or(f: Formula) -> Formula:
    """Rewrite every disjunction into its negated-conjunction form."""
    match f:
        case Taut() | Atom() | Eq():
            return f
        case Not(child):
            return Not(desugar_or(child))
        case And(left, right):
            return And(desugar_or(left), desugar_or(right))
        case Or(left, right):
            return Not(And(Not(desugar_or(left)), Not(desugar_or(right))))
        case Exists(var, child):
            return Exists(var, desugar_or(child))
    raise TypeError(f"not a formula: {f!r}")


def subformulas(f: Formula) -> Iterator[Formula]:
    """Concrete AST subtrees in leftmost-innermost (post-) order."""
    match f:
        case Not(child) | Exists(_, child):
            yield from subformulas(child)
        case And(left, right) | Or(left, right):
            yield from subformulas(left)
            yield from subformulas(right)
    yield f


# ---------------------------------------------------------------------------
# Concrete syntax

_TOKEN = re.compile(
    r"\s*(?:(?P<iff><=>)|(?P<imp>=>)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<one>1)|(?P<punct>[()=!&|.,]))"
)

_KEYWORDS = {"exists", "forall"}


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.items: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None or m.end() == pos:
                if text[pos:].strip():
                    bad = len(text) - len(text[pos:].lstrip())
                    raise ParseError(f"unexpected character {text[bad]!r}", bad)
                break
            kind = m.lastgroup or "punct"
            self.items.append((kind, m.group(m.lastgroup), m.start(m.lastgroup)))
            pos = m.end()
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        if self.i < len(self.items):
            return self.items[self.i]
        return ("eof", "", len(self.text))

    def next(self) -> tuple[str, str, int]:
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, text: str) -> None:
        kind, value, pos = self.next()
        if value != text:
            shown = value if kind != "eof" else "end of input"
            raise ParseError(f"expected {text!r}, found {shown!r}", pos)


class _Parser:
    """Recursive-descent parser for the formula grammar.

    Precedence, loosest first: `<=>`, `=>`, `|`, `&`, unary.  `=>` is
    right-associative, the other binary connectives fold left.  A
    quantifier's scope extends as far right as possible, to the end of
    the formula or the enclosing parenthesis.
    """

    def __init__(self, text: str, scheme: DatabaseScheme, universe: VarUniverse):
        self.toks = _Tokens(text)
        self.scheme = scheme
        self.universe = universe

    def parse(self) -> Formula:
        f = self.formula()
        kind, value, pos = self.toks.peek()
        if kind != "eof":
            raise ParseError(f"unexpected {value!r} after formula", pos)
        return f

    def formula(self) -> Formula:
        return self.iff()

    def iff(self) -> Formula:
        f = self.imp()
        while self.toks.peek()[1] == "<=>":
            self.toks.next()
            g = self.imp()
            f = And(Or(Not(f), g), Or(Not(g), f))
        return f

    def imp(self) -> Formula:
        f = self.or_()
        if self.toks.peek()[1] == "=>":
            self.toks.next()
            g = self.imp()
            return Or(Not(f), g)
        return f

    def or_(self) -> Formula:
        f = self.and_()
        while self.toks.peek()[1] == "|":
            self.toks.next()
            f = Or(f, self.and_())
        return f

    def and_(self) -> Formula:
        f = self.unary()
        while self.toks.peek()[1] == "&":
            self.toks.next()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        kind, value, pos = self.toks.peek()
        if value == "!":
            self.toks.next()
            return Not(self.unary())
        if value in _KEYWORDS:
            self.toks.next()
            names = self.varlist(stop=".")
            self.toks.expect(".")
            body = self.formula()
            for name in reversed(names):
                v = self.universe.add(name)
                if value == "exists":
                    body = Exists(v, body)
                else:
                    body = Not(Exists(v, Not(body)))
            return body
        return self.primary()

    def primary(self) -> Formula:
        kind, value, pos = self.toks.next()
        if value == "1":
            return Taut()
        if value == "(":
            f = self.formula()
            self.toks.expect(")")
            return f
        if kind == "ident":
            if value in _KEYWORDS:
                raise ParseError(f"{value!r} is a reserved word", pos)
            nxt = self.toks.peek()
            if nxt[1] == "(":
                self.toks.next()
                names: list[str] = []
                if self.toks.peek()[1] != ")":
                    names = self.varlist(stop=")")
                self.toks.expect(")")
                if value not in self.scheme.signature:
                    raise ParseError(f"unknown relation symbol {value!r}", pos)
                args = [self.universe.add(n) for n in names]
                try:
                    return check_atom(value, args, self.scheme)
                except SchemeError as exc:
                    raise ParseError(str(exc), pos) from None
            if nxt[1] == "=":
                self.toks.next()
                okind, other, opos = self.toks.next()
                if okind != "ident" or other in _KEYWORDS:
                    raise ParseError("expected a variable after '='", opos)
                return Eq(self.universe.add(value), self.universe.add(other))
            raise ParseError(f"expected '(' or '=' after {value!r}", pos)
        shown = value if kind != "eof" else "end of input"
        raise ParseError(f"expected a formula, found {shown!r}", pos)

    def varlist(self, stop: str) -> list[str]:
        names: list[str] = []
        while True:
            kind, value, pos = self.toks.peek()
            if kind == "ident" and value not in _KEYWORDS:
                self.toks.next()
                names.append(value)
                if self.toks.peek()[1] == ",":
                    self.toks.next()
                continue
            if not names:
                raise ParseError("expected a variable name", pos)
            if value == stop:
                return names
            raise ParseError(f"expected a variable or {stop!r}", pos)


def parse_formula(text: str, scheme: DatabaseScheme, universe: VarUniverse) -> Formula:
    """Parse `text` against `scheme`, registering new variables in `universe`."""
    return _Parser(text, scheme, universe).parse()


_LEVEL_OR = 1
_LEVEL_AND = 2
_LEVEL_UNARY = 3


def pretty(f: Formula) -> str:
    """Render with minimal parentheses; `parse_formula` inverts this."""
    return _render(f, 0, tail=True)


def _render(f: Formula, level: int, tail: bool) -> str:
    match f:
        case Taut():
            return "1"
        case Atom(sym, args):
            return f"{sym}({', '.join(v.name for v in args)})"
        case Eq(x, y):
            return f"{x.name} = {y.name}"
        case Or(left, right):
            s = f"{_render(left, _LEVEL_OR, False)} | {_render(right, _LEVEL_AND, tail)}"
            return f"({s})" if level > _LEVEL_OR else s
        case And(left, right):
            s = f"{_render(left, _LEVEL_AND, False)} & {_render(right, _LEVEL_UNARY, tail)}"
            return f"({s})" if level > _LEVEL_AND else s
        case Not(child):
            return f"!{_render(child, _LEVEL_UNARY, tail)}"
        case Exists(var, child):
            s = f"exists {var.name}. {_render(child, 0, True)}"
            return s if tail else f"({s})"
    raise TypeError(f"not a formula: {f!r}")
