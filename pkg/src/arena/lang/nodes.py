"""AST node definitions for MiniLang.

Every node carries its 1-based (line, column) source position.  Positions
do not participate in equality: two trees compare equal iff they have the
same structure, which is what the parser round-trip property needs.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field


class Type(enum.Enum):
    INT = "int"
    BOOL = "bool"
    INT_ARRAY = "int[]"

    def __str__(self) -> str:
        return self.value


ARITH_OPS = ("+", "-", "*", "/", "%")
REL_OPS = ("<", "<=", ">", ">=", "==", "!=")
LOGIC_OPS = ("&&", "||")


@dataclass
class Node:
    line: int = field(compare=False)
    col: int = field(compare=False)


# --- expressions ---

@dataclass
class Expr(Node):
    pass


@dataclass
class IntLit(Expr):
    value: int


@dataclass
class BoolLit(Expr):
    value: bool


@dataclass
class Var(Expr):
    name: str


@dataclass
class ArrayLit(Expr):
    elements: list[Expr]


@dataclass
class Index(Expr):
    array: Expr
    index: Expr


@dataclass
class Unary(Expr):
    op: str  # "-" or "!"
    operand: Expr


@dataclass
class Binary(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass
class Call(Expr):
    name: str
    args: list[Expr]


# --- statements ---

@dataclass
class Stmt(Node):
    pass


@dataclass
class VarDecl(Stmt):
    name: str
    type: Type
    init: Expr


@dataclass
class Assign(Stmt):
    name: str
    value: Expr


@dataclass
class ArrayAssign(Stmt):
    name: str
    index: Expr
    value: Expr


@dataclass
class If(Stmt):
    cond: Expr
    then_body: list[Stmt]
    else_body: list[Stmt] | None


@dataclass
class While(Stmt):
    cond: Expr
    body: list[Stmt]


@dataclass
class Return(Stmt):
    value: Expr


@dataclass
class FunctionDecl(Node):
    name: str
    params: list[tuple[str, Type]]
    return_type: Type
    body: list[Stmt]


@dataclass
class SourceUnit:
    name: str
    source: str
    functions: list[FunctionDecl]
    line_count: int

    def function(self, name: str) -> FunctionDecl | None:
        for f in self.functions:
            if f.name == name:
                return f
        return None

    def __eq__(self, other: object) -> bool:
        # Units are compared structurally; the raw source text and name
        # are presentation details.
        if not isinstance(other, SourceUnit):
            return NotImplemented
        return self.functions == other.functions


def children(node: Node) -> list[Node]:
    """Ordered child nodes (statements and expressions only)."""
    if isinstance(node, (IntLit, BoolLit, Var)):
        return []
    if isinstance(node, ArrayLit):
        return list(node.elements)
    if isinstance(node, Index):
        return [node.array, node.index]
    if isinstance(node, Unary):
        return [node.operand]
    if isinstance(node, Binary):
        return [node.left, node.right]
    if isinstance(node, Call):
        return list(node.args)
    if isinstance(node, VarDecl):
        return [node.init]
    if isinstance(node, Assign):
        return [node.value]
    if isinstance(node, ArrayAssign):
        return [node.index, node.value]
    if isinstance(node, If):
        kids: list[Node] = [node.cond]
        kids.extend(node.then_body)
        if node.else_body is not None:
            kids.extend(node.else_body)
        return kids
    if isinstance(node, While):
        return [node.cond, *node.body]
    if isinstance(node, Return):
        return [node.value]
    if isinstance(node, FunctionDecl):
        return list(node.body)
    raise TypeError(f"not an AST node: {node!r}")


def node_count(node: Node) -> int:
    """Number of nodes in the subtree rooted at ``node`` (inclusive)."""
    return 1 + sum(node_count(c) for c in children(node))


def walk(node: Node):
    """Preorder traversal of the subtree rooted at ``node``."""
    yield node
    for c in children(node):
        yield from walk(c)
