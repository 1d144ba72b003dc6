"""MiniLang: the small deterministic teaching language the game is played over."""

from . import nodes
from .errors import (ArityOrTypeMismatch, CheckError, LangError, ParseError,
                     SourceTooLarge, TypeCheckFailed, UnknownFunction)
from .interp import (DEFAULT_BUDGET, ExecutionTrace, Outcome, TrapKind,
                     evaluate_call, format_value, value_matches_type, wrap64)
from .parser import parse_unit
from .pretty import expr_to_str, stmt_to_str, unit_to_str
from .reference import reference_call
from .typecheck import check_unit, typecheck

__all__ = [
    "nodes", "parse_unit", "typecheck", "check_unit", "evaluate_call",
    "reference_call", "unit_to_str", "expr_to_str", "stmt_to_str",
    "Outcome", "TrapKind", "ExecutionTrace", "DEFAULT_BUDGET",
    "ParseError", "SourceTooLarge", "CheckError", "TypeCheckFailed",
    "UnknownFunction", "ArityOrTypeMismatch", "LangError",
    "format_value", "value_matches_type", "wrap64",
]
