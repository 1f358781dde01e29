"""Command-line entry point.

Subcommands: `check` (allowedness analysis), `compile` (normalized
formula and relational expression), `eval` (run a formula or expression
against a database), `verify` (exact comparison of the compiled
expression against the valuation oracle), `fuzz` (property suites).

Exit codes: 0 ok, 1 parse/usage error, 2 formula not allowed,
3 verification or suite failure, 4 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import sys

from .analysis import cogen0, coeq_vars, eq_vars, gen0, is_allowed
from .compile import CompileError, compile_allowed, expr_active
from .formula import (
    DatabaseScheme,
    Formula,
    FormulaError,
    VarUniverse,
    Variable,
    free_vars,
    parse_formula,
    pretty,
    scheme_from_text,
)
from .normalize import NotAllowedError, NormalizationError
from .propcheck import GenConfig, SUITES, default_scheme, run_suites
from .relalg import RelalgError, RelExpr, embed, eval_expr, parse_expr, render_expr
from .semantics import (
    DEFAULT_CAP,
    DatabaseFormatError,
    SemanticsError,
    Structure,
    ValuationCapError,
    eval_formula,
    parse_database,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NOT_ALLOWED = 2
EXIT_MISMATCH = 3
EXIT_CAP = 4


class _Session:
    """Parsed inputs shared by the commands."""

    def __init__(self) -> None:
        self.universe = VarUniverse()
        self.scheme: DatabaseScheme | None = None
        self.database: Structure | None = None

    def load_scheme(self, path: str | None) -> None:
        if path is None:
            return
        with open(path, encoding="utf-8") as fh:
            self.scheme = scheme_from_text(fh.read(), self.universe)

    def load_database(self, path: str | None) -> None:
        if path is None:
            return
        with open(path, encoding="utf-8") as fh:
            self.scheme, self.database = parse_database(fh.read(), self.universe, self.scheme)

    def need_scheme(self) -> DatabaseScheme:
        if self.scheme is None:
            raise FormulaError("no scheme given; use --scheme or a database with scheme lines")
        return self.scheme

    def need_database(self) -> Structure:
        if self.database is None:
            raise FormulaError("no database given; use --db")
        return self.database

    def formula_from(self, args: argparse.Namespace) -> Formula:
        if getattr(args, "inline", None) is not None:
            text = args.inline
        elif getattr(args, "formula", None) is not None:
            with open(args.formula, encoding="utf-8") as fh:
                text = fh.read()
        else:
            raise FormulaError("no formula given; use --formula FILE or -e TEXT")
        return parse_formula(text.strip(), self.need_scheme(), self.universe)


def _names(vs: frozenset[Variable]) -> str:
    inner = ", ".join(sorted(v.name for v in vs))
    return "{" + inner + "}"


def _print_relation(rel) -> None:
    print("\t".join(v.name for v in rel.scheme))
    for row in sorted(rel.rows):
        print("\t".join(row))


def cmd_check(session: _Session, args: argparse.Namespace) -> int:
    f = session.formula_from(args)
    report = is_allowed(f)
    print(f"formula: {pretty(f)}")
    print(f"FV: {_names(report.fv)}")
    print(f"gen0: {_names(report.gen0)}")
    print(f"cogen0: {_names(cogen0(f))}")
    eq_cls = eq_vars(f).classes()
    coeq_cls = coeq_vars(f).classes()
    print("eq classes: " + (" ".join(_names(frozenset(c)) for c in eq_cls) or "(identity)"))
    print("coeq classes: " + (" ".join(_names(frozenset(c)) for c in coeq_cls) or "(identity)"))
    print(f"allowed: {'yes' if report.allowed else 'no'}")
    if not report.allowed:
        print(f"reason: {report.reason}")
        if report.failing_subformula is not None:
            print(f"failing subformula: {pretty(report.failing_subformula)}")
        return EXIT_NOT_ALLOWED
    return EXIT_OK


def cmd_compile(session: _Session, args: argparse.Namespace) -> int:
    f = session.formula_from(args)
    scheme = session.need_scheme()
    if args.emit_active:
        print(render_expr(expr_active(f, scheme, session.universe)))
        return EXIT_OK
    result = compile_allowed(f, scheme, session.universe)
    emit_norm = args.emit_normalized or not args.emit_expr
    emit_expr = args.emit_expr or not args.emit_normalized
    if emit_norm:
        print(pretty(result.normalized))
    if emit_expr:
        print(render_expr(result.expr))
    return EXIT_OK


def _expr_from(session: _Session, args: argparse.Namespace) -> RelExpr:
    if args.expr == "-":
        if args.inline is None:
            raise FormulaError("--expr - requires -e TEXT")
        text = args.inline
    else:
        with open(args.expr, encoding="utf-8") as fh:
            text = fh.read()
    return parse_expr(text.strip(), session.need_scheme(), session.universe)


def cmd_eval(session: _Session, args: argparse.Namespace) -> int:
    M = session.need_database()
    scheme = session.need_scheme()
    if args.expr is not None:
        expr = _expr_from(session, args)
    else:
        f = session.formula_from(args)
        expr = compile_allowed(f, scheme, session.universe).expr
    _print_relation(eval_expr(expr, M, scheme))
    return EXIT_OK


def cmd_verify(session: _Session, args: argparse.Namespace) -> int:
    M = session.need_database()
    scheme = session.need_scheme()
    f = session.formula_from(args)
    result = compile_allowed(f, scheme, session.universe)
    vs = session.universe.snapshot()
    lhs = embed(eval_expr(result.expr, M, scheme), M, vs, cap=args.cap)
    rhs = eval_formula(f, M, vs, cap=args.cap)
    if lhs == rhs:
        print("verified: compiled expression matches the oracle")
        return EXIT_OK
    witness = sorted(lhs.vals ^ rhs.vals)[0]
    side = "expression" if witness in lhs.vals else "formula"
    assignment = ", ".join(f"{v.name}={m}" for v, m in zip(vs, witness))
    print("MISMATCH: values differ")
    print(f"witness valuation (only in the {side} side): {assignment}")
    return EXIT_MISMATCH


def cmd_fuzz(session: _Session, args: argparse.Namespace) -> int:
    cfg = GenConfig(seed=args.seed, max_depth=args.max_depth, max_vars=args.max_vars,
                    max_domain=args.max_dom, case_count=args.cases)
    universe = VarUniverse()
    scheme = session.scheme
    if scheme is None:
        scheme = default_scheme(universe)
    else:
        universe = session.universe
    names = list(SUITES) if args.suite == "all" else [args.suite]
    text, ok = run_suites(names, cfg, scheme, universe)
    sys.stdout.write(text)
    return EXIT_OK if ok else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="folra",
        description="Compile allowed first-order formulas into relational algebra.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, db: bool = False) -> None:
        p.add_argument("--scheme", help="scheme declaration file")
        p.add_argument("--formula", help="file holding the formula")
        p.add_argument("-e", dest="inline", metavar="TEXT", help="inline formula text")
        p.add_argument("--cap", type=int, default=DEFAULT_CAP,
                       help="valuation-space cap for oracle evaluation")
        if db:
            p.add_argument("--db", help="database file")

    p = sub.add_parser("check", help="run the allowedness analysis")
    common(p)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("compile", help="normalize and translate a formula")
    common(p)
    p.add_argument("--emit-normalized", action="store_true",
                   help="print only the normalized formula")
    p.add_argument("--emit-expr", action="store_true",
                   help="print only the relational expression")
    p.add_argument("--emit-active", action="store_true",
                   help="print the active-domain translation instead")
    p.set_defaults(fn=cmd_compile)

    p = sub.add_parser("eval", help="evaluate a formula or expression on a database")
    common(p, db=True)
    p.add_argument("--expr", nargs="?", const="-", metavar="FILE",
                   help="treat the input as a relational expression "
                        "(from FILE, or from -e when no file is given)")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("verify", help="compare the compiled expression with the oracle")
    common(p, db=True)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("fuzz", help="run the property suites")
    p.add_argument("--scheme", help="scheme declaration file (default: built-in)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cases", type=int, default=100)
    p.add_argument("--max-vars", type=int, default=4)
    p.add_argument("--max-dom", type=int, default=3)
    p.add_argument("--max-depth", type=int, default=4)
    p.add_argument("--suite", choices=[*SUITES, "all"], default="all")
    p.set_defaults(fn=cmd_fuzz)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    session = _Session()
    try:
        session.load_scheme(getattr(args, "scheme", None))
        session.load_database(getattr(args, "db", None))
        return args.fn(session, args)
    except NotAllowedError as exc:
        print(f"not allowed: {exc}", file=sys.stderr)
        return EXIT_NOT_ALLOWED
    except ValuationCapError as exc:
        print(f"resource cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (FormulaError, DatabaseFormatError, SemanticsError, RelalgError,
            NormalizationError, CompileError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
