"""Seeded random generators and the property suites they drive.

Every generator is a deterministic function of its configuration: the
same config yields byte-identical case streams and reports.  The allowed
generator mixes rejection sampling with constructive templates, since
deep uniformly random formulas are almost never allowed.

The suites compare values through their free-variable projections
wherever both sides are cylinders over known variable sets; this keeps
every enumeration small without weakening any check.
"""

from __future__ import annotations

import random
import zlib
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

from .analysis import (
    cogen0,
    coeq_vars,
    eq_vars,
    gen0,
    is_allowed,
    is_positive,
)
from .compile import active_domain, compile_allowed, expr_active
from .formula import (
    And,
    Atom,
    DatabaseScheme,
    Eq,
    Exists,
    Formula,
    Not,
    Or,
    Signature,
    Taut,
    VarUniverse,
    Variable,
    all_vars,
    atom_rename,
    complement,
    exists_block,
    free_vars,
    pretty,
)
from .normalize import (
    align,
    cleanup,
    cogen,
    conj_eq,
    gen,
    is_normalized,
    normalize_allowed,
    simplify_tautology,
    star_or,
)
from .relalg import (
    Dee,
    Diff,
    Join,
    Project,
    RelExpr,
    Rename,
    Select,
    Union,
    base,
    check_embedding_identities,
    embed,
    eval_expr,
    formula_of_expr,
    render_expr,
)
from .semantics import (
    CheckReport,
    Structure,
    check_cylindric_axioms,
    diagonal,
    eval_formula,
    relation_over,
    value_as_relation,
)

_DOMAIN_ATOMS = tuple("abcdefghij")


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    max_depth: int = 4
    max_vars: int = 4
    max_domain: int = 3
    max_tuples: int = 4
    case_count: int = 100

    def __post_init__(self) -> None:
        for name in ("max_depth", "max_vars", "max_domain", "max_tuples", "case_count"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")

    def derive(self, tag: str, **overrides) -> "GenConfig":
        """A sub-configuration with an independent but reproducible seed."""
        fields = dict(seed=self.seed * 100003 + zlib.crc32(tag.encode()) % 99991,
                      max_depth=self.max_depth, max_vars=self.max_vars,
                      max_domain=self.max_domain, max_tuples=self.max_tuples,
                      case_count=self.case_count)
        fields.update(overrides)
        return GenConfig(**fields)


def default_scheme(universe: VarUniverse) -> DatabaseScheme:
    """The scheme used by the fuzz suites: one unary and one binary symbol.

    The canonical variables come from the same pool as the formula
    variables, which keeps oracle valuation spaces small.
    """
    x1, x2 = universe.add("x1"), universe.add("x2")
    return DatabaseScheme(Signature({"r": 1, "s": 2}), {"r": (x1,), "s": (x1, x2)})


def var_pool(cfg: GenConfig, universe: VarUniverse) -> list[Variable]:
    return [universe.add(f"x{i + 1}") for i in range(cfg.max_vars)]


def _rand_formula(rng: random.Random, scheme: DatabaseScheme,
                  pool: Sequence[Variable], depth: int) -> Formula:
    if depth <= 1:
        kind = rng.choice(("atom", "atom", "eq", "taut"))
        if kind == "atom":
            sym = rng.choice(scheme.symbols())
            args = tuple(rng.choice(pool) for _ in range(scheme.signature.arity(sym)))
            return Atom(sym, args)
        if kind == "eq":
            return Eq(rng.choice(pool), rng.choice(pool))
        return Taut()
    kind = rng.choice(("atom", "eq", "not", "not", "and", "and", "and", "or", "or",
                       "exists", "exists"))
    if kind in ("atom", "eq"):
        return _rand_formula(rng, scheme, pool, 1)
    if kind == "not":
        return Not(_rand_formula(rng, scheme, pool, depth - 1))
    if kind == "and":
        return And(_rand_formula(rng, scheme, pool, depth - 1),
                   _rand_formula(rng, scheme, pool, depth - 1))
    if kind == "or":
        return Or(_rand_formula(rng, scheme, pool, depth - 1),
                  _rand_formula(rng, scheme, pool, depth - 1))
    return Exists(rng.choice(pool), _rand_formula(rng, scheme, pool, depth - 1))


def gen_formula(cfg: GenConfig, scheme: DatabaseScheme,
                universe: VarUniverse) -> Iterator[Formula]:
    """A deterministic stream of random formulas."""
    rng = random.Random(f"{cfg.seed}/formula")
    pool = var_pool(cfg, universe)
    for _ in range(cfg.case_count):
        yield _rand_formula(rng, scheme, pool, rng.randint(1, cfg.max_depth))


def _template_allowed(rng: random.Random, scheme: DatabaseScheme,
                      pool: Sequence[Variable], depth: int) -> Formula:
    """Constructively allowed formulas: every combinator below preserves
    allowedness, so no rejection is needed."""
    if depth <= 1:
        sym = rng.choice(scheme.symbols())
        args = tuple(rng.choice(pool) for _ in range(scheme.signature.arity(sym)))
        return Atom(sym, args)
    kind = rng.choice(("conj", "conj", "eq_extend", "exists", "exists", "negdiff",
                       "star", "closed_neg", "atom"))
    if kind == "atom":
        return _template_allowed(rng, scheme, pool, 1)
    if kind == "conj":
        return And(_template_allowed(rng, scheme, pool, depth - 1),
                   _template_allowed(rng, scheme, pool, depth - 1))
    if kind == "eq_extend":
        f = _template_allowed(rng, scheme, pool, depth - 1)
        fv = sorted(free_vars(f), key=lambda v: v.ord)
        if not fv:
            return f
        return And(f, Eq(rng.choice(fv), rng.choice(pool)))
    if kind == "exists":
        f = _template_allowed(rng, scheme, pool, depth - 1)
        g0 = sorted(gen0(f), key=lambda v: v.ord)
        if not g0:
            return f
        return Exists(rng.choice(g0), f)
    if kind == "negdiff":
        f = _template_allowed(rng, scheme, pool, depth - 1)
        fv = sorted(free_vars(f), key=lambda v: v.ord)
        inner_pool = fv if fv else list(pool)
        g = _template_allowed(rng, scheme, inner_pool, max(1, depth - 2))
        if not free_vars(g) <= free_vars(f):
            return f
        return And(f, Not(g))
    if kind == "star":
        f = _template_allowed(rng, scheme, pool, depth - 1)
        g = _template_allowed(rng, scheme, pool, max(1, depth - 2))
        return star_or(f, g)
    f = _template_allowed(rng, scheme, pool, max(1, depth - 2))
    return Not(exists_block(free_vars(f), f))


def gen_allowed(cfg: GenConfig, scheme: DatabaseScheme,
                universe: VarUniverse) -> Iterator[Formula]:
    """A deterministic stream of allowed formulas.

    Roughly half come from rejection-sampling the uniform generator (for
    shape coverage, including closed negative formulas), the rest from
    the constructive templates.
    """
    rng = random.Random(f"{cfg.seed}/allowed")
    pool = var_pool(cfg, universe)
    produced = 0
    while produced < cfg.case_count:
        if rng.random() < 0.5:
            candidate = _template_allowed(rng, scheme, pool, rng.randint(1, cfg.max_depth))
        else:
            for _ in range(30):
                candidate = _rand_formula(rng, scheme, pool, rng.randint(1, cfg.max_depth))
                if is_allowed(candidate).allowed:
                    break
            else:
                candidate = _template_allowed(rng, scheme, pool, rng.randint(1, cfg.max_depth))
        if not is_allowed(candidate).allowed:
            continue
        yield candidate
        produced += 1


def gen_structure(cfg: GenConfig, scheme: DatabaseScheme) -> Iterator[Structure]:
    """A deterministic stream of structures, with forced edge cases:
    every 50-case window contains an all-empty-relations structure and a
    singleton-domain structure."""
    rng = random.Random(f"{cfg.seed}/structure")
    syms = scheme.symbols()
    for case in range(cfg.case_count):
        if case % 50 == 0:
            size = rng.randint(1, cfg.max_domain)
            yield Structure(_DOMAIN_ATOMS[:size], {sym: frozenset() for sym in syms})
            continue
        if case % 50 == 1:
            domain = _DOMAIN_ATOMS[:1]
        else:
            domain = _DOMAIN_ATOMS[:rng.randint(1, cfg.max_domain)]
        interp = {}
        for sym in syms:
            arity = scheme.signature.arity(sym)
            count = rng.randint(0, cfg.max_tuples)
            interp[sym] = frozenset(
                tuple(rng.choice(domain) for _ in range(arity)) for _ in range(count))
        yield Structure(domain, interp)


# ---------------------------------------------------------------------------
# Shrinking


def _replacements(f: Formula) -> Iterator[Formula]:
    """Smaller candidate formulas: direct subtrees and single-position
    replacements of a subtree by the tautology or by its own child."""
    match f:
        case Taut() | Atom() | Eq():
            return
        case Not(child) | Exists(_, child):
            yield child
        case And(left, right) | Or(left, right):
            yield left
            yield right
    yield Taut()

    def rebuilt(g: Formula) -> Iterator[Formula]:
        match g:
            case Not(child):
                for c in rebuilt(child):
                    yield Not(c)
                yield child
            case Exists(var, child):
                for c in rebuilt(child):
                    yield Exists(var, c)
                yield child
            case And(left, right):
                for c in rebuilt(left):
                    yield And(c, right)
                for c in rebuilt(right):
                    yield And(left, c)
            case Or(left, right):
                for c in rebuilt(left):
                    yield Or(c, right)
                for c in rebuilt(right):
                    yield Or(left, c)
            case _:
                if not isinstance(g, Taut):
                    yield Taut()

    yield from rebuilt(f)


def shrink_formula(f: Formula, still_failing: Callable[[Formula], bool],
                   require_allowed: bool = False) -> Formula:
    """Greedy first-improvement shrinking to a local minimum."""
    def acceptable(g: Formula) -> bool:
        if require_allowed and not is_allowed(g).allowed:
            return False
        try:
            return still_failing(g)
        except Exception:
            return False

    improved = True
    while improved:
        improved = False
        for candidate in _replacements(f):
            if candidate != f and acceptable(candidate):
                f = candidate
                improved = True
                break
    return f


def shrink_structure(M: Structure, still_failing: Callable[[Structure], bool]) -> Structure:
    """Drop tuples one at a time while the failure persists."""
    improved = True
    while improved:
        improved = False
        for sym in sorted(M.interp):
            for t in sorted(M.interp[sym]):
                smaller = dict(M.interp)
                smaller[sym] = M.interp[sym] - {t}
                candidate = Structure(M.domain, smaller)
                try:
                    if still_failing(candidate):
                        M = candidate
                        improved = True
                        break
                except Exception:
                    continue
            if improved:
                break
    return M


def _witness(f: Formula, M: Structure) -> str:
    dom = " ".join(M.domain)
    rels = "; ".join(
        f"{sym}={{{', '.join(' '.join(t) for t in sorted(M.interp[sym]))}}}"
        for sym in sorted(M.interp))
    return f"formula {pretty(f)} on domain {{{dom}}} with {rels}"


# ---------------------------------------------------------------------------
# Property suites


def suite_axioms(cfg: GenConfig, scheme: DatabaseScheme, universe: VarUniverse) -> CheckReport:
    """Cylindric-algebra axioms of the powerset algebra, per structure."""
    report = CheckReport()
    pool = var_pool(cfg, universe)
    vs = tuple(sorted(set(pool), key=lambda v: v.ord))
    structures = list(gen_structure(cfg.derive("axioms", case_count=4), scheme))
    per_structure = max(1, cfg.case_count // len(structures))
    for i, M in enumerate(structures):
        while len(M.domain) ** len(vs) > 512:
            M = M.with_domain(M.domain[:-1])
        sub = check_cylindric_axioms(M, vs, samples=per_structure, seed=cfg.seed + i)
        for entry in sub.entries:
            entry.name = f"|M|={len(M.domain)}: {entry.name}"
        report.entries.extend(sub.entries)
    return report


def _rand_expr(rng: random.Random, scheme: DatabaseScheme,
               pool: Sequence[Variable], depth: int) -> RelExpr:
    """A random well-formed expression; scheme-constrained operators are
    fed variants of their own subtree to stay well-formed."""
    if depth <= 1:
        if rng.random() < 0.15:
            return Dee()
        return base(rng.choice(scheme.symbols()), scheme)
    child = _rand_expr(rng, scheme, pool, depth - 1)
    kind = rng.choice(("union", "minus", "join", "project", "select", "rename"))
    if kind == "join":
        return Join(child, _rand_expr(rng, scheme, pool, depth - 1))
    if kind in ("union", "minus"):
        sch = sorted(child.scheme, key=lambda v: v.ord)
        variants: list[RelExpr] = [child]
        if sch:
            x, y = rng.choice(sch), rng.choice(sch)
            variants.append(Select(x, y, child))
            variants.append(Diff(child, Select(x, y, child)))
        other = rng.choice(variants)
        return Union(child, other) if kind == "union" else Diff(child, other)
    sch = sorted(child.scheme, key=lambda v: v.ord)
    if kind == "project" or not sch:
        keep = frozenset(v for v in sch if rng.random() < 0.6)
        return Project(keep, child)
    if kind == "select":
        return Select(rng.choice(sch), rng.choice(sch), child)
    outside = [v for v in pool if v not in child.scheme]
    if not outside:
        return Select(rng.choice(sch), rng.choice(sch), child)
    return Rename(rng.choice(outside), rng.choice(sch), child)


def suite_imli(cfg: GenConfig, scheme: DatabaseScheme, universe: VarUniverse) -> CheckReport:
    """Embedding identities, plus the expression-to-formula direction."""
    report = CheckReport()
    pool = var_pool(cfg, universe)
    vs = tuple(sorted(set(pool) | {v for args in scheme.canon.values() for v in args},
                      key=lambda v: v.ord))
    structures = list(gen_structure(cfg.derive("imli", case_count=4), scheme))
    per_structure = max(1, cfg.case_count // len(structures))
    for i, M in enumerate(structures):
        sub = check_embedding_identities(M, vs, samples=per_structure, seed=cfg.seed + i)
        for entry in sub.entries:
            entry.name = f"|M|={len(M.domain)}: {entry.name}"
        report.entries.extend(sub.entries)

    e = report.entry("expression-to-formula agreement")
    rng = random.Random(f"{cfg.seed}/imli-exprs")
    structures2 = list(gen_structure(cfg.derive("imli2", case_count=3, max_domain=2), scheme))
    for _ in range(min(cfg.case_count, 200)):
        expr = _rand_expr(rng, scheme, pool, depth=rng.randint(1, 5))
        f = formula_of_expr(expr, scheme)
        for M in structures2:
            e.cases += 1
            lhs = embed(eval_expr(expr, M, scheme), M, vs)
            rhs = eval_formula(f, M, vs)
            if lhs != rhs:
                e.failures.append(f"{render_expr(expr)} vs {pretty(f)} on |M|={len(M.domain)}")
    return report


def suite_eqcoeq(cfg: GenConfig, scheme: DatabaseScheme, universe: VarUniverse) -> CheckReport:
    """Meaning of equality/coequality, positivity, and the active-domain
    bound for the generated-variable sets."""
    report = CheckReport()
    structures = list(gen_structure(cfg.derive("eqcoeq", case_count=3), scheme))
    e_eq = report.entry("eq pairs force the diagonal")
    e_coeq = report.entry("coeq pairs force the diagonal on the complement")
    e_pos = report.entry("positive/negative formulas trivialize coeq/eq")
    e_act = report.entry("generated variables stay in the active domain")
    e_swap = report.entry("complement swaps eq and coeq")
    for f in gen_formula(cfg, scheme, universe):
        vs = tuple(sorted(all_vars(f), key=lambda v: v.ord))
        eq_p, coeq_p = eq_vars(f), coeq_vars(f)

        e_pos.cases += 1
        if is_positive(f):
            if not coeq_p.is_identity():
                e_pos.failures.append(f"positive {pretty(f)} has non-identity coeq")
        elif not eq_p.is_identity():
            e_pos.failures.append(f"negative {pretty(f)} has non-identity eq")

        e_swap.cases += 1
        fc = complement(f)
        if eq_vars(fc) != coeq_p or coeq_vars(fc) != eq_p:
            e_swap.failures.append(pretty(f))

        for M in structures:
            val = eval_formula(f, M, vs) if vs else None
            if val is None:
                break
            cval = val.complement()
            e_eq.cases += 1
            if any(not val <= diagonal(M, vs, *p) for p in eq_p.nontrivial_pairs()):
                e_eq.failures.append(_witness(f, M))
            e_coeq.cases += 1
            if any(not cval <= diagonal(M, vs, *p) for p in coeq_p.nontrivial_pairs()):
                e_coeq.failures.append(_witness(f, M))

            e_act.cases += 1
            act = active_domain(M)
            ok = all(a in act for t in val.project(gen0(f)) for a in t) and \
                all(a in act for t in cval.project(cogen0(f)) for a in t)
            if not ok:
                e_act.failures.append(_witness(f, M))
    return report


def suite_gen(cfg: GenConfig, scheme: DatabaseScheme, universe: VarUniverse) -> CheckReport:
    """Generator/cogenerator containments and their free-variable laws."""
    report = CheckReport()
    structures = list(gen_structure(cfg.derive("gen", case_count=3), scheme))
    e_contain = report.entry("value inside generator, complement inside cogenerator")
    e_triv = report.entry("trivial cogenerators of positive formulas")
    e_fv = report.entry("generator free variables")
    for f in gen_formula(cfg, scheme, universe):
        g, cg = gen(f), cogen(f)
        e_fv.cases += 1
        okay = gen0(f) <= free_vars(g) <= free_vars(f) and \
            cogen0(f) <= free_vars(cg) <= free_vars(f)
        if is_allowed(f).allowed and free_vars(g) != gen0(f):
            okay = False
        if not okay:
            e_fv.failures.append(pretty(f))
        vs = tuple(sorted(all_vars(f) | all_vars(g) | all_vars(cg), key=lambda v: v.ord))
        if not vs:
            continue
        for M in structures:
            e_contain.cases += 1
            val = eval_formula(f, M, vs)
            if not (val <= eval_formula(g, M, vs)
                    and val.complement() <= eval_formula(cg, M, vs)):
                e_contain.failures.append(_witness(f, M))
            e_triv.cases += 1
            if is_positive(f):
                if not eval_formula(cg, M, vs).is_full():
                    e_triv.failures.append(_witness(f, M))
            elif not eval_formula(g, M, vs).is_full():
                e_triv.failures.append(_witness(f, M))
    return report


def suite_norm(cfg: GenConfig, scheme: DatabaseScheme, universe: VarUniverse) -> CheckReport:
    """Normalization lemmas on the allowed corpus, with small structures."""
    report = CheckReport()
    structures = list(gen_structure(cfg.derive("norm", case_count=3, max_domain=2), scheme))
    rng = random.Random(f"{cfg.seed}/norm-extras")
    pool = var_pool(cfg, universe)
    e_norm_form = report.entry("normalization output is normalized with the same FV")
    e_equiv = report.entry("allowed formulas equal their normalization")
    e_eqc = report.entry("normalization refines eq and coeq")
    e_bound = report.entry("normalization stays inside the generator")
    e_within = report.entry("normalization agrees within the helper formula")
    e_chain = report.entry("conjunction normalization satisfies its equality chain")
    e_taut = report.entry("tautology simplification preserves values")
    e_align = report.entry("alignment agrees within the padding formula")
    e_rename = report.entry("atom renaming preserves the value")
    for f in gen_allowed(cfg, scheme, universe):
        try:
            n = normalize_allowed(f, scheme, universe)
        except Exception as exc:
            e_norm_form.cases += 1
            e_norm_form.failures.append(f"{pretty(f)}: {exc}")
            continue
        e_norm_form.cases += 1
        if not (is_normalized(n, scheme) and free_vars(n) == free_vars(f)):
            e_norm_form.failures.append(pretty(f))
        e_eqc.cases += 1
        if not (eq_vars(f).refines(eq_vars(n)) and coeq_vars(f).refines(coeq_vars(n))):
            e_eqc.failures.append(f"{pretty(f)} -> {pretty(n)}")

        psi = cleanup(gen(f), scheme, universe)
        g, cg = gen(f), cogen(f)
        st = simplify_tautology(f)
        fv = free_vars(f)
        for M in structures:
            rel_f = relation_over(f, M, fv)
            rel_n = relation_over(n, M, fv)
            e_equiv.cases += 1
            if rel_f != rel_n:
                e_equiv.failures.append(_witness(f, M))
            e_bound.cases += 1
            vs_n = tuple(sorted(all_vars(n) | free_vars(g) | free_vars(cg),
                                key=lambda v: v.ord))
            ok = True
            if vs_n:
                val_n = eval_formula(n, M, vs_n)
                ok = (val_n.project(free_vars(g)) <= relation_over(g, M, free_vars(g))
                      and val_n.complement().project(free_vars(cg))
                      <= relation_over(cg, M, free_vars(cg)))
            if not ok:
                e_bound.failures.append(_witness(f, M))
            e_within.cases += 1
            rel_psi = relation_over(psi, M, fv)
            if (rel_n & rel_psi) != (rel_f & rel_psi):
                e_within.failures.append(_witness(f, M))
            e_taut.cases += 1
            if relation_over(st, M, fv) != rel_f:
                e_taut.failures.append(_witness(f, M))
        if isinstance(f, And):
            chain = conj_eq(f.left, f.right)
            cv = free_vars(chain)
            for M in structures:
                e_chain.cases += 1
                if not relation_over(n, M, cv) <= relation_over(chain, M, cv):
                    e_chain.failures.append(_witness(f, M))

        # Alignment and atom renaming on derived cases.
        extra = Atom("s", (rng.choice(pool), rng.choice(pool))) \
            if "s" in scheme.signature else Taut()
        gpad = And(f, extra)
        if free_vars(f) < free_vars(gpad):
            a = align(f, gpad)
            av = free_vars(gpad)
            for M in structures:
                e_align.cases += 1
                lhs = relation_over(a, M, av) & relation_over(gpad, M, av)
                rhs = relation_over(f, M, av) & relation_over(gpad, M, av)
                if lhs != rhs:
                    e_align.failures.append(_witness(f, M))
        sym = rng.choice(scheme.symbols())
        canon = scheme.canonical_args(sym)
        targets = tuple(rng.choice(pool) for _ in canon)
        renamed = atom_rename(Atom(sym, canon), targets, universe)
        direct = Atom(sym, targets)
        tv = free_vars(direct)
        for M in structures:
            e_rename.cases += 1
            if relation_over(renamed, M, tv) != relation_over(direct, M, tv):
                e_rename.failures.append(f"{sym} renamed to {pretty(direct)} on |M|={len(M.domain)}")
    return report


def suite_e2e(cfg: GenConfig, scheme: DatabaseScheme, universe: VarUniverse) -> CheckReport:
    """Completeness of the compiler, domain independence, and agreement of
    the two independent translations."""
    report = CheckReport()
    structures = list(gen_structure(cfg.derive("e2e", case_count=5), scheme))
    e_complete = report.entry("compiled expression embeds to the formula value")
    e_domind = report.entry("compiled output is domain independent")
    e_diff = report.entry("active-domain compiler agrees")
    junk = ("J1", "J2")
    for f in gen_allowed(cfg, scheme, universe):
        try:
            result = compile_allowed(f, scheme, universe)
            active = expr_active(f, scheme, universe)
        except Exception as exc:
            e_complete.cases += 1
            e_complete.failures.append(f"{pretty(f)}: {exc}")
            continue
        for M in structures:
            e_complete.cases += 1
            got = eval_expr(result.expr, M, scheme)
            want = value_as_relation(f, M)
            if got.rows != want:
                e_complete.failures.append(_witness(f, M))
            e_domind.cases += 1
            M2 = M.with_domain(M.domain + junk)
            got2 = eval_expr(result.expr, M2, scheme)
            want2 = value_as_relation(f, M2)
            if got2.rows != got.rows or want2 != want:
                e_domind.failures.append(_witness(f, M))
            e_diff.cases += 1
            via_active = eval_expr(active, M, scheme)
            if via_active.rows != got.rows or via_active.scheme != got.scheme:
                e_diff.failures.append(_witness(f, M))
    return report


SUITES: dict[str, Callable[[GenConfig, DatabaseScheme, VarUniverse], CheckReport]] = {
    "imli": suite_imli,
    "axioms": suite_axioms,
    "eqcoeq": suite_eqcoeq,
    "gen": suite_gen,
    "norm": suite_norm,
    "e2e": suite_e2e,
}


def run_suites(names: Sequence[str], cfg: GenConfig, scheme: DatabaseScheme,
               universe: VarUniverse) -> tuple[str, bool]:
    """Run the named suites and render one deterministic report."""
    lines = []
    ok = True
    for name in names:
        report = SUITES[name](cfg, scheme, universe)
        ok = ok and report.ok
        lines.append(f"== suite {name}")
        lines.append(report.render())
    lines.append("RESULT: " + ("ok" if ok else "FAILED"))
    return "\n".join(lines) + "\n", ok
