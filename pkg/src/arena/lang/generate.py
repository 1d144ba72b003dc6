"""Seeded random generator of well-typed MiniLang programs.

Used by the differential-testing corpus and the property tests.  Programs
are well-typed by construction (and re-checked by callers); loops may be
non-terminating, which the step budget turns into a deterministic trap.
"""

from __future__ import annotations

import random

from . import nodes as n
from .parser import parse_unit
from .pretty import unit_to_str

_INT_POOL = [-9, -3, -2, 0, 2, 3, 7, 8, 64, 1 << 62]


class _FnGen:
    def __init__(self, rng: random.Random, name: str, callables: list[n.FunctionDecl]):
        self.rng = rng
        self.name = name
        self.callables = callables  # previously generated functions, callable here
        self.counter = 0
        self.scope: list[tuple[str, n.Type]] = []

    def fresh(self) -> str:
        self.counter += 1
        return f"v{self.counter}"

    def vars_of(self, ty: n.Type) -> list[str]:
        return [v for v, t in self.scope if t == ty]

    def expr(self, ty: n.Type, depth: int) -> n.Expr:
        rng = self.rng
        if depth <= 0 or rng.random() < 0.35:
            return self.leaf(ty)
        choices = ["binary", "unary", "leaf"]
        if ty == n.Type.INT and self.vars_of(n.Type.INT_ARRAY):
            choices.append("index")
        if ty != n.Type.INT_ARRAY:
            targets = [f for f in self.callables if f.return_type == ty]
            if targets:
                choices.append("call")
        kind = rng.choice(choices)
        if kind == "leaf":
            return self.leaf(ty)
        if kind == "unary":
            if ty == n.Type.INT:
                return n.Unary(1, 1, "-", self.expr(n.Type.INT, depth - 1))
            if ty == n.Type.BOOL:
                return n.Unary(1, 1, "!", self.expr(n.Type.BOOL, depth - 1))
            return self.leaf(ty)
        if kind == "index":
            name = rng.choice(self.vars_of(n.Type.INT_ARRAY))
            return n.Index(1, 1, n.Var(1, 1, name), self.expr(n.Type.INT, depth - 1))
        if kind == "call":
            fn = rng.choice([f for f in self.callables if f.return_type == ty])
            args = [self.expr(pt, depth - 1) for _, pt in fn.params]
            return n.Call(1, 1, fn.name, args)
        if ty == n.Type.INT:
            op = rng.choice(n.ARITH_OPS)
            return n.Binary(1, 1, op, self.expr(n.Type.INT, depth - 1), self.expr(n.Type.INT, depth - 1))
        if ty == n.Type.BOOL:
            roll = rng.random()
            if roll < 0.5:
                op = rng.choice(n.REL_OPS[:4])
                return n.Binary(1, 1, op, self.expr(n.Type.INT, depth - 1), self.expr(n.Type.INT, depth - 1))
            if roll < 0.75:
                op = rng.choice(("==", "!="))
                ety = rng.choice((n.Type.INT, n.Type.BOOL))
                return n.Binary(1, 1, op, self.expr(ety, depth - 1), self.expr(ety, depth - 1))
            op = rng.choice(n.LOGIC_OPS)
            return n.Binary(1, 1, op, self.expr(n.Type.BOOL, depth - 1), self.expr(n.Type.BOOL, depth - 1))
        return self.leaf(ty)

    def leaf(self, ty: n.Type) -> n.Expr:
        rng = self.rng
        candidates = self.vars_of(ty)
        if candidates and rng.random() < 0.6:
            return n.Var(1, 1, rng.choice(candidates))
        if ty == n.Type.INT:
            return n.IntLit(1, 1, rng.choice(_INT_POOL))
        if ty == n.Type.BOOL:
            return n.BoolLit(1, 1, rng.random() < 0.5)
        size = rng.randint(0, 3)
        return n.ArrayLit(1, 1, [n.IntLit(1, 1, rng.randint(-2, 2)) for _ in range(size)])

    def block(self, depth: int, n_stmts: int) -> list[n.Stmt]:
        stmts: list[n.Stmt] = []
        base = len(self.scope)
        for _ in range(n_stmts):
            stmts.append(self.stmt(depth))
        del self.scope[base:]
        return stmts

    def stmt(self, depth: int) -> n.Stmt:
        rng = self.rng
        choices = ["vardecl", "vardecl", "assign", "if"]
        if depth > 0:
            choices.append("while")
        if self.vars_of(n.Type.INT_ARRAY):
            choices.append("arrayassign")
        kind = rng.choice(choices)
        if kind == "vardecl" or (kind == "assign" and not self.scope):
            ty = rng.choice((n.Type.INT, n.Type.INT, n.Type.BOOL, n.Type.INT_ARRAY))
            name = self.fresh()
            init = self.expr(ty, depth)
            self.scope.append((name, ty))
            return n.VarDecl(1, 1, name, ty, init)
        if kind == "assign":
            name, ty = rng.choice(self.scope)
            return n.Assign(1, 1, name, self.expr(ty, depth))
        if kind == "arrayassign":
            name = rng.choice(self.vars_of(n.Type.INT_ARRAY))
            return n.ArrayAssign(1, 1, name, self.expr(n.Type.INT, depth - 1),
                                 self.expr(n.Type.INT, depth - 1))
        if kind == "while":
            # Mostly bounded loops: count an int var down/up a few steps.
            ints = self.vars_of(n.Type.INT)
            if ints and rng.random() < 0.8:
                name = rng.choice(ints)
                cond = n.Binary(1, 1, ">", n.Var(1, 1, name), n.IntLit(1, 1, 0))
                body = self.block(depth - 1, rng.randint(0, 2))
                body.append(n.Assign(1, 1, name,
                                     n.Binary(1, 1, "-", n.Var(1, 1, name), n.IntLit(1, 1, 1))))
                return n.While(1, 1, cond, body)
            cond = self.expr(n.Type.BOOL, depth - 1)
            return n.While(1, 1, cond, self.block(depth - 1, rng.randint(0, 2)))
        cond = self.expr(n.Type.BOOL, depth)
        then_body = self.block(depth - 1, rng.randint(1, 2))
        else_body = self.block(depth - 1, rng.randint(1, 2)) if rng.random() < 0.5 else None
        return n.If(1, 1, cond, then_body, else_body)


def gen_unit(rng: random.Random, max_functions: int = 2) -> n.SourceUnit:
    """Generate a well-typed unit and re-parse it so positions are real."""
    functions: list[n.FunctionDecl] = []
    n_functions = rng.randint(1, max_functions)
    for idx in range(n_functions):
        name = f"f{idx}"
        params = []
        for p in range(rng.randint(1, 3)):
            ptype = rng.choice((n.Type.INT, n.Type.INT, n.Type.BOOL, n.Type.INT_ARRAY))
            params.append((f"p{p}", ptype))
        ret = rng.choice((n.Type.INT, n.Type.INT, n.Type.BOOL))
        g = _FnGen(rng, name, functions)
        g.scope = list(params)
        body = g.block(2, rng.randint(0, 3))
        body.append(n.Return(1, 1, g.expr(ret, 2)))
        functions.append(n.FunctionDecl(1, 1, name, params, ret, body))
    draft = n.SourceUnit("gen", "", functions, 1)
    return parse_unit(unit_to_str(draft), name="gen")


def gen_args(rng: random.Random, fn: n.FunctionDecl) -> list[object]:
    args: list[object] = []
    for _, ty in fn.params:
        if ty == n.Type.INT:
            args.append(rng.randint(-8, 8))
        elif ty == n.Type.BOOL:
            args.append(rng.random() < 0.5)
        else:
            args.append([rng.randint(-2, 2) for _ in range(rng.randint(0, 3))])
    return args
