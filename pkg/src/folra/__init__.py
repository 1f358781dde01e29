"""folra: compile allowed first-order formulas into relational algebra,
with a brute-force valuation-semantics oracle for exact verification."""

from .analysis import (
    AllowedReport,
    Partition,
    cl,
    cogen0,
    coeq_vars,
    eq_vars,
    equiv_closure,
    gen0,
    is_allowed,
    is_positive,
)
from .compile import (
    CompileError,
    CompileResult,
    active_domain,
    active_domain_expr,
    compile_allowed,
    expr_active,
    expr_of_normalized,
)
from .formula import (
    And,
    Atom,
    DatabaseScheme,
    Eq,
    Exists,
    Formula,
    FormulaError,
    Not,
    Or,
    ParseError,
    SchemeError,
    Signature,
    Taut,
    VarUniverse,
    Variable,
    atom_rename,
    complement,
    free_vars,
    parse_formula,
    pretty,
    scheme_from_text,
    subst_chain,
)
from .normalize import (
    NormalizationError,
    NotAllowedError,
    align,
    cleanup,
    cogen,
    conj_eq,
    gen,
    is_normalized,
    minimal_representation,
    norm,
    normalize_allowed,
    simplify_tautology,
    star_or,
)
from .propcheck import GenConfig, gen_allowed, gen_formula, gen_structure, run_suites
from .relalg import (
    Base,
    Dee,
    Diff,
    Join,
    Project,
    RelExpr,
    Relation,
    RelalgError,
    Rename,
    Select,
    Union,
    difference,
    embed,
    eval_expr,
    formula_of_expr,
    join,
    parse_expr,
    project,
    rename_attr,
    render_expr,
    select_eq,
    union,
)
from .semantics import (
    DEFAULT_CAP,
    Structure,
    ValuationCapError,
    ValuationSet,
    all_valuations,
    check_cylindric_axioms,
    cylindrify,
    cylindrify_set,
    diagonal,
    eval_formula,
    naive_eval,
    parse_database,
    value_as_relation,
)

__all__ = [name for name in dir() if not name.startswith("_")]
