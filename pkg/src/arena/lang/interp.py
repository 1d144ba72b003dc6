"""Production interpreter for MiniLang.

Semantics:
  * integers are 64-bit two's-complement and wrap on overflow
  * / and % are truncated division, trapping on a zero right operand
  * array indexing out of range traps
  * every executed statement and every evaluated binary operation costs
    one step; exhausting the budget traps with StepBudgetExceeded and
    steps_used == budget
  * && and || short-circuit (one step for the operator either way)
  * arrays have value semantics: copied on declaration, assignment,
    argument passing and return

The execution trace distinguishes two line sets:
  * covered_lines: display coverage: the function's declaration line on
    entry plus the line of every executed simple statement (declaration,
    assignment, return); branch headers do not mark their own line
  * executed_lines: instrumentation: the line of every statement and
    expression that was actually evaluated; a superset of covered_lines,
    used for kill/coverage soundness reasoning
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from enum import Enum

from . import nodes as n
from .errors import ArityOrTypeMismatch, UnknownFunction

DEFAULT_BUDGET = 100_000
# Guards the host stack; MiniLang recursion deeper than this is treated as
# resource exhaustion, same as running out of steps.
MAX_CALL_DEPTH = 2_000

_WRAP = 1 << 64
_SIGN = 1 << 63


def wrap64(x: int) -> int:
    return (x + _SIGN) % _WRAP - _SIGN


class TrapKind(Enum):
    DIV_BY_ZERO = "DivByZero"
    MOD_BY_ZERO = "ModByZero"
    INDEX_OUT_OF_BOUNDS = "IndexOutOfBounds"
    STEP_BUDGET_EXCEEDED = "StepBudgetExceeded"


@dataclass(frozen=True)
class Outcome:
    """Result of one evaluation: either a value or a trap kind."""

    value: object = None
    trap: TrapKind | None = None

    @property
    def is_value(self) -> bool:
        return self.trap is None

    def __str__(self) -> str:
        if self.trap is not None:
            return f"Trap({self.trap.value})"
        return f"Value({format_value(self.value)})"


@dataclass(frozen=True)
class ExecutionTrace:
    covered_lines: frozenset[int]
    executed_lines: frozenset[int]
    steps_used: int


def format_value(v: object) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, list):
        return "[" + ", ".join(str(x) for x in v) + "]"
    return str(v)


def value_matches_type(v: object, ty: n.Type) -> bool:
    if ty == n.Type.INT:
        return isinstance(v, int) and not isinstance(v, bool)
    if ty == n.Type.BOOL:
        return isinstance(v, bool)
    return isinstance(v, list) and all(isinstance(x, int) and not isinstance(x, bool) for x in v)


class _Trap(Exception):
    def __init__(self, kind: TrapKind):
        self.kind = kind


class _ReturnSignal(Exception):
    def __init__(self, value: object):
        self.value = value


class _Exec:
    def __init__(self, unit: n.SourceUnit, budget: int):
        self.unit = unit
        self.budget = budget
        self.steps = 0
        self.covered: set[int] = set()
        self.executed: set[int] = set()
        self.depth = 0

    def charge(self) -> None:
        if self.steps >= self.budget:
            raise _Trap(TrapKind.STEP_BUDGET_EXCEEDED)
        self.steps += 1

    def call(self, fn: n.FunctionDecl, args: list[object]) -> object:
        self.depth += 1
        if self.depth > MAX_CALL_DEPTH:
            raise _Trap(TrapKind.STEP_BUDGET_EXCEEDED)
        self.covered.add(fn.line)
        self.executed.add(fn.line)
        env = {pname: _copy(v) for (pname, _), v in zip(fn.params, args)}
        try:
            self.run_block(fn.body, env)
        except _ReturnSignal as ret:
            return ret.value
        finally:
            self.depth -= 1
        raise AssertionError("typechecked function fell off the end")

    def run_block(self, body: list[n.Stmt], env: dict[str, object]) -> None:
        declared = []
        try:
            for s in body:
                self.executed.add(s.line)
                if isinstance(s, n.VarDecl):
                    self.charge()
                    self.covered.add(s.line)
                    env[s.name] = _copy(self.eval(s.init, env))
                    declared.append(s.name)
                elif isinstance(s, n.Assign):
                    self.charge()
                    self.covered.add(s.line)
                    env[s.name] = _copy(self.eval(s.value, env))
                elif isinstance(s, n.ArrayAssign):
                    self.charge()
                    self.covered.add(s.line)
                    idx = self.eval(s.index, env)
                    val = self.eval(s.value, env)
                    arr = env[s.name]
                    if not 0 <= idx < len(arr):
                        raise _Trap(TrapKind.INDEX_OUT_OF_BOUNDS)
                    arr[idx] = val
                elif isinstance(s, n.Return):
                    self.charge()
                    self.covered.add(s.line)
                    raise _ReturnSignal(_copy(self.eval(s.value, env)))
                elif isinstance(s, n.If):
                    self.charge()
                    if self.eval(s.cond, env):
                        self.run_block(s.then_body, env)
                    elif s.else_body is not None:
                        self.run_block(s.else_body, env)
                elif isinstance(s, n.While):
                    while True:
                        self.executed.add(s.line)
                        self.charge()
                        if not self.eval(s.cond, env):
                            break
                        self.run_block(s.body, env)
                else:
                    raise TypeError(f"unknown statement: {s!r}")
        finally:
            for name in declared:
                env.pop(name, None)

    def eval(self, e: n.Expr, env: dict[str, object]) -> object:
        self.executed.add(e.line)
        if isinstance(e, n.IntLit):
            return e.value
        if isinstance(e, n.BoolLit):
            return e.value
        if isinstance(e, n.Var):
            return env[e.name]
        if isinstance(e, n.ArrayLit):
            return [self.eval(x, env) for x in e.elements]
        if isinstance(e, n.Index):
            arr = self.eval(e.array, env)
            idx = self.eval(e.index, env)
            if not 0 <= idx < len(arr):
                raise _Trap(TrapKind.INDEX_OUT_OF_BOUNDS)
            return arr[idx]
        if isinstance(e, n.Unary):
            v = self.eval(e.operand, env)
            return wrap64(-v) if e.op == "-" else not v
        if isinstance(e, n.Binary):
            if e.op in ("&&", "||"):
                self.charge()
                left = self.eval(e.left, env)
                if e.op == "&&":
                    return self.eval(e.right, env) if left else False
                return True if left else self.eval(e.right, env)
            left = self.eval(e.left, env)
            right = self.eval(e.right, env)
            self.charge()
            return _binop(e.op, left, right)
        if isinstance(e, n.Call):
            args = [self.eval(a, env) for a in e.args]
            fn = self.unit.function(e.name)
            return self.call(fn, args)
        raise TypeError(f"not an expression: {e!r}")


def _copy(v: object) -> object:
    return list(v) if isinstance(v, list) else v


def _binop(op: str, a: object, b: object) -> object:
    if op == "+":
        return wrap64(a + b)
    if op == "-":
        return wrap64(a - b)
    if op == "*":
        return wrap64(a * b)
    if op == "/":
        if b == 0:
            raise _Trap(TrapKind.DIV_BY_ZERO)
        q = abs(a) // abs(b)
        return wrap64(-q if (a < 0) != (b < 0) else q)
    if op == "%":
        if b == 0:
            raise _Trap(TrapKind.MOD_BY_ZERO)
        q = abs(a) // abs(b)
        if (a < 0) != (b < 0):
            q = -q
        return wrap64(a - q * b)
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    if op == ">=":
        return a >= b
    if op == "==":
        return a == b
    if op == "!=":
        return a != b
    raise TypeError(f"unknown operator {op!r}")


def evaluate_call(unit: n.SourceUnit, fn_name: str, args: list[object],
                  budget: int = DEFAULT_BUDGET) -> tuple[Outcome, ExecutionTrace]:
    """Evaluate ``fn_name(args)`` in a typechecked unit.

    Deterministic and side-effect free; traps are outcomes, not exceptions.
    UnknownFunction / ArityOrTypeMismatch signal caller bugs.
    """
    fn = unit.function(fn_name)
    if fn is None:
        raise UnknownFunction(fn_name)
    if len(args) != len(fn.params):
        raise ArityOrTypeMismatch(f"{fn_name} takes {len(fn.params)} arguments, got {len(args)}")
    for v, (pname, ptype) in zip(args, fn.params):
        if not value_matches_type(v, ptype):
            raise ArityOrTypeMismatch(f"argument {pname!r} of {fn_name} must be {ptype}")
    # Deep MiniLang recursion nests several Python frames per call.
    if sys.getrecursionlimit() < MAX_CALL_DEPTH * 20:
        sys.setrecursionlimit(MAX_CALL_DEPTH * 20)
    ex = _Exec(unit, budget)
    try:
        result = Outcome(value=ex.call(fn, list(args)))
    except _Trap as trap:
        if trap.kind == TrapKind.STEP_BUDGET_EXCEEDED:
            ex.steps = budget
        result = Outcome(trap=trap.kind)
    trace = ExecutionTrace(frozenset(ex.covered), frozenset(ex.executed), ex.steps)
    return result, trace
