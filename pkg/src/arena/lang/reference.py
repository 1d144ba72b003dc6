"""Naive reference evaluator for MiniLang.

Deliberately minimal and separate from the production interpreter so the
two can be compared differentially.  Shares only the AST node classes and
the Outcome/ExecutionTrace containers.  Statement execution threads an
explicit "did we return" flag instead of using exceptions, environments
are plain dict copies, and there is no shared evaluation helper.
"""

from __future__ import annotations

import sys

from . import nodes as n
from .interp import (DEFAULT_BUDGET, MAX_CALL_DEPTH, ExecutionTrace, Outcome,
                     TrapKind, wrap64)


class _RefTrap(Exception):
    def __init__(self, kind):
        self.kind = kind


class _State:
    def __init__(self, budget):
        self.budget = budget
        self.steps = 0
        self.covered = set()
        self.executed = set()
        self.depth = 0

    def step(self):
        if self.steps == self.budget:
            raise _RefTrap(TrapKind.STEP_BUDGET_EXCEEDED)
        self.steps += 1


def reference_call(unit, fn_name, args, budget=DEFAULT_BUDGET):
    """Evaluate fn_name(args) naively; same contract as interp.evaluate_call."""
    if sys.getrecursionlimit() < MAX_CALL_DEPTH * 20:
        sys.setrecursionlimit(MAX_CALL_DEPTH * 20)
    st = _State(budget)
    try:
        value = _call(unit, unit.function(fn_name), list(args), st)
        outcome = Outcome(value=value)
    except _RefTrap as t:
        if t.kind == TrapKind.STEP_BUDGET_EXCEEDED:
            st.steps = budget
        outcome = Outcome(trap=t.kind)
    return outcome, ExecutionTrace(frozenset(st.covered), frozenset(st.executed), st.steps)


def _call(unit, fn, args, st):
    st.depth += 1
    if st.depth > MAX_CALL_DEPTH:
        raise _RefTrap(TrapKind.STEP_BUDGET_EXCEEDED)
    st.covered.add(fn.line)
    st.executed.add(fn.line)
    env = {}
    for (pname, _), v in zip(fn.params, args):
        env[pname] = list(v) if isinstance(v, list) else v
    done, value = _exec_block(unit, fn.body, env, st)
    assert done, "typechecked function must return"
    st.depth -= 1
    return value


def _exec_block(unit, body, env, st):
    for s in body:
        st.executed.add(s.line)
        if isinstance(s, n.Return):
            st.step()
            st.covered.add(s.line)
            v = _eval(unit, s.value, env, st)
            return True, (list(v) if isinstance(v, list) else v)
        if isinstance(s, n.VarDecl):
            st.step()
            st.covered.add(s.line)
            v = _eval(unit, s.init, env, st)
            env[s.name] = list(v) if isinstance(v, list) else v
        elif isinstance(s, n.Assign):
            st.step()
            st.covered.add(s.line)
            v = _eval(unit, s.value, env, st)
            env[s.name] = list(v) if isinstance(v, list) else v
        elif isinstance(s, n.ArrayAssign):
            st.step()
            st.covered.add(s.line)
            i = _eval(unit, s.index, env, st)
            v = _eval(unit, s.value, env, st)
            if i < 0 or i >= len(env[s.name]):
                raise _RefTrap(TrapKind.INDEX_OUT_OF_BOUNDS)
            env[s.name][i] = v
        elif isinstance(s, n.If):
            st.step()
            if _eval(unit, s.cond, env, st):
                done, value = _exec_block(unit, s.then_body, env, st)
                if done:
                    return True, value
            elif s.else_body is not None:
                done, value = _exec_block(unit, s.else_body, env, st)
                if done:
                    return True, value
        elif isinstance(s, n.While):
            while True:
                st.executed.add(s.line)
                st.step()
                if not _eval(unit, s.cond, env, st):
                    break
                done, value = _exec_block(unit, s.body, env, st)
                if done:
                    return True, value
    return False, None


def _eval(unit, e, env, st):
    st.executed.add(e.line)
    if isinstance(e, n.IntLit):
        return e.value
    if isinstance(e, n.BoolLit):
        return e.value
    if isinstance(e, n.Var):
        return env[e.name]
    if isinstance(e, n.ArrayLit):
        return [_eval(unit, x, env, st) for x in e.elements]
    if isinstance(e, n.Index):
        arr = _eval(unit, e.array, env, st)
        i = _eval(unit, e.index, env, st)
        if i < 0 or i >= len(arr):
            raise _RefTrap(TrapKind.INDEX_OUT_OF_BOUNDS)
        return arr[i]
    if isinstance(e, n.Unary):
        v = _eval(unit, e.operand, env, st)
        if e.op == "-":
            return wrap64(-v)
        return not v
    if isinstance(e, n.Call):
        args = [_eval(unit, a, env, st) for a in e.args]
        return _call(unit, unit.function(e.name), args, st)
    if isinstance(e, n.Binary):
        if e.op == "&&":
            st.step()
            if not _eval(unit, e.left, env, st):
                return False
            return _eval(unit, e.right, env, st)
        if e.op == "||":
            st.step()
            if _eval(unit, e.left, env, st):
                return True
            return _eval(unit, e.right, env, st)
        a = _eval(unit, e.left, env, st)
        b = _eval(unit, e.right, env, st)
        st.step()
        if e.op == "+":
            return wrap64(a + b)
        if e.op == "-":
            return wrap64(a - b)
        if e.op == "*":
            return wrap64(a * b)
        if e.op == "/":
            if b == 0:
                raise _RefTrap(TrapKind.DIV_BY_ZERO)
            sign = -1 if (a < 0) != (b < 0) else 1
            return wrap64(sign * (abs(a) // abs(b)))
        if e.op == "%":
            if b == 0:
                raise _RefTrap(TrapKind.MOD_BY_ZERO)
            sign = -1 if (a < 0) != (b < 0) else 1
            return wrap64(a - sign * (abs(a) // abs(b)) * b)
        if e.op == "<":
            return a < b
        if e.op == "<=":
            return a <= b
        if e.op == ">":
            return a > b
        if e.op == ">=":
            return a >= b
        if e.op == "==":
            return a == b
        if e.op == "!=":
            return a != b
    raise TypeError(f"cannot evaluate {e!r}")
