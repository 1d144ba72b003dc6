"""Canonical pretty-printer for MiniLang ASTs.

The printed form is the unit's canonical layout: one statement per line,
two-space indentation.  parse(pretty(parse(s))) is structurally equal to
parse(s) for any valid source s.
"""

from __future__ import annotations

from . import nodes as n

_PRECEDENCE = {"||": 1, "&&": 2, "==": 3, "!=": 3, "<": 4, "<=": 4, ">": 4, ">=": 4,
               "+": 5, "-": 5, "*": 6, "/": 6, "%": 6}
_UNARY_PREC = 7


def expr_to_str(e: n.Expr, parent_prec: int = 0, right_side: bool = False) -> str:
    if isinstance(e, n.IntLit):
        return str(e.value)
    if isinstance(e, n.BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, n.Var):
        return e.name
    if isinstance(e, n.ArrayLit):
        return "[" + ", ".join(expr_to_str(x) for x in e.elements) + "]"
    if isinstance(e, n.Index):
        base = expr_to_str(e.array, _UNARY_PREC + 1)
        return f"{base}[{expr_to_str(e.index)}]"
    if isinstance(e, n.Unary):
        return e.op + expr_to_str(e.operand, _UNARY_PREC)
    if isinstance(e, n.Call):
        return e.name + "(" + ", ".join(expr_to_str(a) for a in e.args) + ")"
    if isinstance(e, n.Binary):
        prec = _PRECEDENCE[e.op]
        text = f"{expr_to_str(e.left, prec)} {e.op} {expr_to_str(e.right, prec, right_side=True)}"
        # All binary operators associate left; a right child at equal
        # precedence needs parentheses, as does any child at lower precedence.
        if prec < parent_prec or (prec == parent_prec and right_side):
            return f"({text})"
        return text
    raise TypeError(f"not an expression: {e!r}")


def stmt_to_str(s: n.Stmt) -> str:
    """Single-line rendering of one statement (nested blocks inlined)."""
    return "\n".join(_stmt_lines(s, 0)).strip()


def _stmt_lines(s: n.Stmt, depth: int) -> list[str]:
    pad = "  " * depth
    if isinstance(s, n.VarDecl):
        return [f"{pad}var {s.name}: {s.type} = {expr_to_str(s.init)};"]
    if isinstance(s, n.Assign):
        return [f"{pad}{s.name} = {expr_to_str(s.value)};"]
    if isinstance(s, n.ArrayAssign):
        return [f"{pad}{s.name}[{expr_to_str(s.index)}] = {expr_to_str(s.value)};"]
    if isinstance(s, n.Return):
        return [f"{pad}return {expr_to_str(s.value)};"]
    if isinstance(s, n.If):
        lines = [f"{pad}if ({expr_to_str(s.cond)}) {{"]
        for inner in s.then_body:
            lines.extend(_stmt_lines(inner, depth + 1))
        if s.else_body is not None:
            lines.append(f"{pad}}} else {{")
            for inner in s.else_body:
                lines.extend(_stmt_lines(inner, depth + 1))
        lines.append(f"{pad}}}")
        return lines
    if isinstance(s, n.While):
        lines = [f"{pad}while ({expr_to_str(s.cond)}) {{"]
        for inner in s.body:
            lines.extend(_stmt_lines(inner, depth + 1))
        lines.append(f"{pad}}}")
        return lines
    raise TypeError(f"not a statement: {s!r}")


def unit_to_str(unit: n.SourceUnit) -> str:
    chunks = []
    for f in unit.functions:
        params = ", ".join(f"{p}: {t}" for p, t in f.params)
        lines = [f"fun {f.name}({params}) -> {f.return_type} {{"]
        for s in f.body:
            lines.extend(_stmt_lines(s, 1))
        lines.append("}")
        chunks.append("\n".join(lines))
    return "\n\n".join(chunks) + "\n"
