"""Type checker for MiniLang.

Rules enforced:
  * function names unique; parameter names unique per function
  * variables declared before use, visible only inside their block,
    no redeclaration anywhere in the same function
  * arithmetic on int, logic on bool, ==/!= on int or bool (not arrays),
    relational comparison on int, indexing int[] with int
  * calls target functions in the same unit with matching arity and types
  * every control path ends in a return of the declared return type;
    an empty function body is reported as missing_return

Successful checking annotates every expression node with its type via the
``ty`` attribute, which the mutation engine relies on.
"""

from __future__ import annotations

from . import nodes as n
from .errors import CheckError, TypeCheckFailed


def typecheck(unit: n.SourceUnit) -> list[CheckError]:
    """Return the list of violations; an empty list means the unit is typed."""
    errors: list[CheckError] = []
    sigs: dict[str, n.FunctionDecl] = {}
    for f in unit.functions:
        if f.name in sigs:
            errors.append(CheckError(f.line, f"duplicate function {f.name!r}", "duplicate_function"))
        else:
            sigs[f.name] = f
    for f in unit.functions:
        _check_function(f, sigs, errors)
    return errors


def check_unit(unit: n.SourceUnit) -> n.SourceUnit:
    """Typecheck and return the unit; raise TypeCheckFailed on violations."""
    errors = typecheck(unit)
    if errors:
        raise TypeCheckFailed(errors)
    return unit


def _check_function(f: n.FunctionDecl, sigs: dict[str, n.FunctionDecl],
                    errors: list[CheckError]) -> None:
    scope: dict[str, n.Type] = {}
    declared: set[str] = set()
    for pname, ptype in f.params:
        if pname in scope:
            errors.append(CheckError(f.line, f"duplicate parameter {pname!r}", "duplicate_param"))
        scope[pname] = ptype
        declared.add(pname)

    def check_expr(e: n.Expr) -> n.Type | None:
        ty = _expr_type(e, scope, sigs, errors)
        e.ty = ty
        return ty

    def check_block(body: list[n.Stmt]) -> None:
        local_names: list[str] = []
        for s in body:
            if isinstance(s, n.VarDecl):
                ty = check_expr(s.init)
                if s.name in declared:
                    errors.append(CheckError(s.line, f"redeclaration of {s.name!r}", "redeclaration"))
                else:
                    if ty is not None and ty != s.type:
                        errors.append(CheckError(
                            s.line, f"cannot initialize {s.type} variable {s.name!r} with {ty}"))
                    scope[s.name] = s.type
                    declared.add(s.name)
                    local_names.append(s.name)
            elif isinstance(s, n.Assign):
                ty = check_expr(s.value)
                target = scope.get(s.name)
                if target is None:
                    errors.append(CheckError(s.line, f"assignment to undeclared variable {s.name!r}",
                                             "undeclared_var"))
                elif ty is not None and ty != target:
                    errors.append(CheckError(s.line, f"cannot assign {ty} to {target} variable {s.name!r}"))
            elif isinstance(s, n.ArrayAssign):
                idx_ty = check_expr(s.index)
                val_ty = check_expr(s.value)
                target = scope.get(s.name)
                if target is None:
                    errors.append(CheckError(s.line, f"assignment to undeclared variable {s.name!r}",
                                             "undeclared_var"))
                elif target != n.Type.INT_ARRAY:
                    errors.append(CheckError(s.line, f"{s.name!r} is not an array"))
                if idx_ty is not None and idx_ty != n.Type.INT:
                    errors.append(CheckError(s.line, "array index must be int"))
                if val_ty is not None and val_ty != n.Type.INT:
                    errors.append(CheckError(s.line, "array element must be int"))
            elif isinstance(s, n.If):
                cond_ty = check_expr(s.cond)
                if cond_ty is not None and cond_ty != n.Type.BOOL:
                    errors.append(CheckError(s.line, "if condition must be bool"))
                check_block(s.then_body)
                if s.else_body is not None:
                    check_block(s.else_body)
            elif isinstance(s, n.While):
                cond_ty = check_expr(s.cond)
                if cond_ty is not None and cond_ty != n.Type.BOOL:
                    errors.append(CheckError(s.line, "while condition must be bool"))
                check_block(s.body)
            elif isinstance(s, n.Return):
                ty = check_expr(s.value)
                if ty is not None and ty != f.return_type:
                    errors.append(CheckError(
                        s.line, f"returned {ty} where {f.return_type} expected"))
            else:
                raise TypeError(f"unknown statement: {s!r}")
        for name in local_names:
            del scope[name]

    check_block(f.body)
    if not _always_returns(f.body):
        errors.append(CheckError(f.line, f"not all paths in {f.name!r} return a value",
                                 "missing_return"))


def _always_returns(body: list[n.Stmt]) -> bool:
    for s in body:
        if isinstance(s, n.Return):
            return True
        if isinstance(s, n.If) and s.else_body is not None:
            if _always_returns(s.then_body) and _always_returns(s.else_body):
                return True
    return False


def _expr_type(e: n.Expr, scope: dict[str, n.Type], sigs: dict[str, n.FunctionDecl],
               errors: list[CheckError]) -> n.Type | None:
    def sub(x: n.Expr) -> n.Type | None:
        ty = _expr_type(x, scope, sigs, errors)
        x.ty = ty
        return ty

    if isinstance(e, n.IntLit):
        return n.Type.INT
    if isinstance(e, n.BoolLit):
        return n.Type.BOOL
    if isinstance(e, n.Var):
        ty = scope.get(e.name)
        if ty is None:
            errors.append(CheckError(e.line, f"use of undeclared variable {e.name!r}", "undeclared_var"))
        return ty
    if isinstance(e, n.ArrayLit):
        for x in e.elements:
            ty = sub(x)
            if ty is not None and ty != n.Type.INT:
                errors.append(CheckError(x.line, "array elements must be int"))
        return n.Type.INT_ARRAY
    if isinstance(e, n.Index):
        arr_ty = sub(e.array)
        idx_ty = sub(e.index)
        if arr_ty is not None and arr_ty != n.Type.INT_ARRAY:
            errors.append(CheckError(e.line, "only int[] can be indexed"))
        if idx_ty is not None and idx_ty != n.Type.INT:
            errors.append(CheckError(e.line, "array index must be int"))
        return n.Type.INT
    if isinstance(e, n.Unary):
        ty = sub(e.operand)
        want = n.Type.INT if e.op == "-" else n.Type.BOOL
        if ty is not None and ty != want:
            errors.append(CheckError(e.line, f"unary {e.op!r} requires {want}, got {ty}"))
        return want
    if isinstance(e, n.Binary):
        lt = sub(e.left)
        rt = sub(e.right)
        if e.op in n.ARITH_OPS:
            for ty in (lt, rt):
                if ty is not None and ty != n.Type.INT:
                    errors.append(CheckError(e.line, f"operator {e.op!r} requires int operands"))
            return n.Type.INT
        if e.op in ("==", "!="):
            if lt is not None and rt is not None:
                if lt == n.Type.INT_ARRAY or rt == n.Type.INT_ARRAY:
                    errors.append(CheckError(e.line, "arrays cannot be compared"))
                elif lt != rt:
                    errors.append(CheckError(e.line, f"cannot compare {lt} with {rt}"))
            return n.Type.BOOL
        if e.op in n.REL_OPS:
            for ty in (lt, rt):
                if ty is not None and ty != n.Type.INT:
                    errors.append(CheckError(e.line, f"operator {e.op!r} requires int operands"))
            return n.Type.BOOL
        if e.op in n.LOGIC_OPS:
            for ty in (lt, rt):
                if ty is not None and ty != n.Type.BOOL:
                    errors.append(CheckError(e.line, f"operator {e.op!r} requires bool operands"))
            return n.Type.BOOL
        raise TypeError(f"unknown operator {e.op!r}")
    if isinstance(e, n.Call):
        arg_types = [sub(a) for a in e.args]
        target = sigs.get(e.name)
        if target is None:
            errors.append(CheckError(e.line, f"call to unknown function {e.name!r}", "unknown_function"))
            return None
        if len(arg_types) != len(target.params):
            errors.append(CheckError(
                e.line, f"{e.name!r} takes {len(target.params)} arguments, got {len(arg_types)}"))
        else:
            for ty, (pname, ptype) in zip(arg_types, target.params):
                if ty is not None and ty != ptype:
                    errors.append(CheckError(e.line, f"argument {pname!r} of {e.name!r} must be {ptype}"))
        return target.return_type
    raise TypeError(f"not an expression: {e!r}")
