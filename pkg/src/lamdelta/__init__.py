"""Workbench for the classical natural deduction calculus lambda-Delta:
typing, labeled reduction, the De Morgan and conjunction-elimination
translations, and executable simulation and postponement certificates."""

from .concrete import ParseError, parse, parse_context, parse_formula, show, show_formula
from .rewrite import RuleId, Step, Trace, normalize, redexes, reduction_graph, system
from .syntax import alpha_eq, fill, free_vars, fresh, subst
from .typecheck import SystemId, TypeCheckError, infer, infer_ctx, in_system

__all__ = [
    "ParseError", "RuleId", "Step", "SystemId", "Trace", "TypeCheckError",
    "alpha_eq", "fill", "free_vars", "fresh", "in_system", "infer",
    "infer_ctx", "normalize", "parse", "parse_context", "parse_formula",
    "redexes", "reduction_graph", "show", "show_formula", "subst", "system",
]

__version__ = "0.1.0"
