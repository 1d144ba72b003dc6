"""Mutant enumeration and free-edit submission validation.

Operators (applied in this order at each AST site, preorder):
  AOR  arithmetic operator replacement within {+, -, *, /, %}
  ROR  relational operator replacement within {<, <=, >, >=, ==, !=}
  LOR  && <-> ||
  UOI  insert unary - (int) or ! (bool) at a leaf operand
  CRP  integer literal c -> c+1, c-1, 0 (skipping results equal to c)
  SDL  delete one non-return statement (kept only if the result typechecks)

Attackers may alternatively submit a free edit of the whole unit; it is
accepted when it parses, typechecks, keeps every function signature, and
differs from the original by at most ``max_edited_nodes`` AST nodes under
the edit-summary charging rule below.
"""

from __future__ import annotations

import copy
import difflib
from dataclasses import dataclass, field

from .lang import nodes as n
from .lang.errors import ParseError, SourceTooLarge, TypeCheckFailed
from .lang.parser import parse_unit
from .lang.pretty import expr_to_str, stmt_to_str, unit_to_str
from .lang.typecheck import typecheck

OPERATORS = ("AOR", "ROR", "LOR", "UOI", "CRP", "SDL")

DEFAULT_MAX_EDITED_NODES = 5


@dataclass
class MutantLimits:
    max_edited_nodes: int = DEFAULT_MAX_EDITED_NODES


@dataclass
class MutantCandidate:
    operator: str
    line: int
    col: int
    original_fragment: str
    mutated_fragment: str
    mutated_source: str


@dataclass
class AstEditSummary:
    edited_node_count: int = 0
    edited_lines: set[int] = field(default_factory=set)


class ValidationError(Exception):
    def __init__(self, code: str, message: str, line: int | None = None):
        super().__init__(message)
        self.code = code
        self.line = line


@dataclass
class Mutant:
    """A validated attacker submission, independent of game lifecycle."""

    source: str
    unit: n.SourceUnit
    edited_node_count: int
    edited_lines: set[int]


# --- enumeration ---

def enumerate_mutants(unit: n.SourceUnit, ops: set[str] | None = None) -> list[MutantCandidate]:
    """All operator-generated mutants of a typechecked unit.

    Deterministic order: AST preorder over sites, operator order as listed
    in OPERATORS, replacement order as listed in each operator's set.
    Duplicates (same mutated source) and candidates that fail to typecheck
    are dropped.
    """
    if ops is None:
        ops = set(OPERATORS)
    candidates: list[MutantCandidate] = []
    seen: set[str] = set()

    def emit(op: str, node: n.Node, original: str, mutated: str, build) -> None:
        mutated_unit = build()
        source = unit_to_str(mutated_unit)
        if source in seen:
            return
        reparsed = parse_unit(source, unit.name)
        if typecheck(reparsed):
            return
        seen.add(source)
        candidates.append(MutantCandidate(op, node.line, node.col, original, mutated, source))

    for f_idx, f in enumerate(unit.functions):
        for path, node in _preorder(f):
            if isinstance(node, n.Binary):
                frag = expr_to_str(node)
                if "AOR" in ops and node.op in n.ARITH_OPS:
                    for op in n.ARITH_OPS:
                        if op != node.op:
                            emit("AOR", node, frag, _with_op(node, op),
                                 lambda op=op: _rebuild(unit, f_idx, path, _replace_op(node, op)))
                if "ROR" in ops and node.op in n.REL_OPS and _is_int_comparison(node):
                    for op in n.REL_OPS:
                        if op != node.op:
                            emit("ROR", node, frag, _with_op(node, op),
                                 lambda op=op: _rebuild(unit, f_idx, path, _replace_op(node, op)))
                if "LOR" in ops and node.op in n.LOGIC_OPS:
                    other = "||" if node.op == "&&" else "&&"
                    emit("LOR", node, frag, _with_op(node, other),
                         lambda other=other: _rebuild(unit, f_idx, path, _replace_op(node, other)))
            if "UOI" in ops and isinstance(node, (n.Var, n.Index, n.IntLit, n.BoolLit)):
                if not _is_store_target(f, path):
                    ty = getattr(node, "ty", None)
                    uop = {"int": "-", "bool": "!"}.get(str(ty) if ty else "", None)
                    if uop is not None:
                        frag = expr_to_str(node)
                        wrapped = n.Unary(node.line, node.col, uop, copy.deepcopy(node))
                        emit("UOI", node, frag, expr_to_str(wrapped),
                             lambda wrapped=wrapped: _rebuild(unit, f_idx, path, wrapped))
            if "CRP" in ops and isinstance(node, n.IntLit):
                for new in (node.value + 1, node.value - 1, 0):
                    if new != node.value:
                        repl = n.IntLit(node.line, node.col, new)
                        emit("CRP", node, str(node.value), str(new),
                             lambda repl=repl: _rebuild(unit, f_idx, path, repl))
            if "SDL" in ops and isinstance(node, n.Stmt) and not isinstance(node, n.Return):
                emit("SDL", node, stmt_to_str(node), "",
                     lambda: _rebuild(unit, f_idx, path, None))
    return candidates


def site_counts(unit: n.SourceUnit) -> dict[str, int]:
    """Mutation-site counts per operator, by direct AST scan.

    n_a/n_r/n_l count operator sites, n_o negatable leaf operands,
    n_c integer literals, n_s deletable (still typechecking) statements.
    """
    counts = dict.fromkeys(("n_a", "n_r", "n_l", "n_o", "n_c", "n_s"), 0)
    for f_idx, f in enumerate(unit.functions):
        for path, node in _preorder(f):
            if isinstance(node, n.Binary):
                if node.op in n.ARITH_OPS:
                    counts["n_a"] += 1
                elif node.op in n.REL_OPS and _is_int_comparison(node):
                    counts["n_r"] += 1
                elif node.op in n.LOGIC_OPS:
                    counts["n_l"] += 1
            if isinstance(node, (n.Var, n.Index, n.IntLit, n.BoolLit)) and not _is_store_target(f, path):
                if str(getattr(node, "ty", None)) in ("int", "bool"):
                    counts["n_o"] += 1
            if isinstance(node, n.IntLit):
                counts["n_c"] += 1
            if isinstance(node, n.Stmt) and not isinstance(node, n.Return):
                deleted = _rebuild(unit, f_idx, path, None)
                if not typecheck(parse_unit(unit_to_str(deleted), unit.name)):
                    counts["n_s"] += 1
    return counts


def _is_int_comparison(node: n.Binary) -> bool:
    # ROR keeps the whole relational set applicable, which needs int operands;
    # bool ==/!= sites are excluded (b < c would not typecheck).
    return str(getattr(node.left, "ty", "int")) == "int"


def _with_op(node: n.Binary, op: str) -> str:
    return expr_to_str(n.Binary(node.line, node.col, op, node.left, node.right))


def _replace_op(node: n.Binary, op: str) -> n.Binary:
    clone = copy.deepcopy(node)
    clone.op = op
    return clone


def _preorder(f: n.FunctionDecl):
    """Yield (path, node) pairs; a path is a list of child indices from f."""
    def rec(node: n.Node, path: list[int]):
        yield path, node
        for i, c in enumerate(n.children(node)):
            yield from rec(c, path + [i])
    for i, s in enumerate(f.body):
        yield from rec(s, [i])


def _node_at(f: n.FunctionDecl, path: list[int]) -> n.Node:
    node: n.Node = f.body[path[0]]
    for i in path[1:]:
        node = n.children(node)[i]
    return node


def _is_store_target(f: n.FunctionDecl, path: list[int]) -> bool:
    # The name in `x = e;` / `x[i] = e;` is not an expression in this AST
    # (it is a field), so every reachable leaf is a load; nothing to skip.
    # Kept as an explicit hook in case the AST grows lvalue nodes.
    return False


def _rebuild(unit: n.SourceUnit, f_idx: int, path: list[int],
             replacement: n.Node | None) -> n.SourceUnit:
    """Copy of the unit with the node at (f_idx, path) replaced or deleted."""
    clone = copy.deepcopy(unit)
    container, index = _locate(clone.functions[f_idx], path)
    if replacement is None:
        del container[index]
    else:
        container[index] = copy.deepcopy(replacement)
    return clone


def _locate(f: n.FunctionDecl, path: list[int]):
    """Return (mutable container, index) addressing the node at path."""
    if len(path) == 1:
        return f.body, path[0]
    node: n.Node = f.body[path[0]]
    for depth, i in enumerate(path[1:], start=1):
        last = depth == len(path) - 1
        container, index = _child_slot(node, i)
        if last:
            return container, index
        node = container[index]
    raise AssertionError("unreachable")


class _Attr(list):
    """Adapter presenting a single attribute as a one-slot container."""

    def __init__(self, obj, attr):
        self.obj = obj
        self.attr = attr

    def __getitem__(self, _):
        return getattr(self.obj, self.attr)

    def __setitem__(self, _, value):
        setattr(self.obj, self.attr, value)

    def __delitem__(self, _):
        raise TypeError("cannot delete a required child")


def _child_slot(node: n.Node, i: int):
    """Container/index pair for the i-th child of node (children() order)."""
    if isinstance(node, n.ArrayLit):
        return node.elements, i
    if isinstance(node, n.Index):
        return (_Attr(node, "array"), 0) if i == 0 else (_Attr(node, "index"), 0)
    if isinstance(node, n.Unary):
        return _Attr(node, "operand"), 0
    if isinstance(node, n.Binary):
        return (_Attr(node, "left"), 0) if i == 0 else (_Attr(node, "right"), 0)
    if isinstance(node, n.Call):
        return node.args, i
    if isinstance(node, n.VarDecl):
        return _Attr(node, "init"), 0
    if isinstance(node, n.Assign):
        return _Attr(node, "value"), 0
    if isinstance(node, n.ArrayAssign):
        return (_Attr(node, "index"), 0) if i == 0 else (_Attr(node, "value"), 0)
    if isinstance(node, n.If):
        if i == 0:
            return _Attr(node, "cond"), 0
        i -= 1
        if i < len(node.then_body):
            return node.then_body, i
        return node.else_body, i - len(node.then_body)
    if isinstance(node, n.While):
        return (_Attr(node, "cond"), 0) if i == 0 else (node.body, i - 1)
    if isinstance(node, n.Return):
        return _Attr(node, "value"), 0
    raise TypeError(f"node has no children: {node!r}")


# --- edit summary / free-edit validation ---

def ast_edit_summary(original: n.SourceUnit, edited: n.SourceUnit) -> AstEditSummary:
    """Deterministic top-down tree diff.

    Recurses into equal-kinded nodes; a node whose kind differs is charged
    as the size of the replacement subtree (min 1); a scalar-field change
    on an equal-kinded node is charged 1; deletions are charged 1 and
    insertions their subtree size.  edited_lines refers to original-source
    lines (insertions are attributed to the nearest original neighbour).
    """
    summary = AstEditSummary()
    for f_orig in original.functions:
        f_new = edited.function(f_orig.name)
        if f_new is None:
            continue
        _diff_lists(f_orig.body, f_new.body, f_orig.line, summary)
    return summary


def _scalars(node: n.Node) -> tuple:
    if isinstance(node, n.IntLit):
        return (node.value,)
    if isinstance(node, n.BoolLit):
        return (node.value,)
    if isinstance(node, n.Var):
        return (node.name,)
    if isinstance(node, (n.Unary, n.Binary)):
        return (node.op,)
    if isinstance(node, n.Call):
        return (node.name,)
    if isinstance(node, n.VarDecl):
        return (node.name, node.type)
    if isinstance(node, (n.Assign, n.ArrayAssign)):
        return (node.name,)
    if isinstance(node, n.If):
        return (node.else_body is not None,)
    return ()


def _diff_nodes(a: n.Node, b: n.Node, summary: AstEditSummary) -> None:
    if type(a) is not type(b):
        summary.edited_node_count += max(1, n.node_count(b))
        summary.edited_lines.add(a.line)
        return
    if _scalars(a) != _scalars(b):
        summary.edited_node_count += 1
        summary.edited_lines.add(a.line)
    ka, kb = n.children(a), n.children(b)
    if len(ka) == len(kb):
        for ca, cb in zip(ka, kb):
            _diff_nodes(ca, cb, summary)
    else:
        _diff_lists(ka, kb, a.line, summary)


def _fingerprint(node: n.Node) -> str:
    # Canonical text is a position-independent structural fingerprint.
    if isinstance(node, n.Stmt):
        return stmt_to_str(node)
    return expr_to_str(node)


def _diff_lists(old: list[n.Node], new: list[n.Node], anchor_line: int,
                summary: AstEditSummary) -> None:
    if len(old) == len(new):
        for ca, cb in zip(old, new):
            _diff_nodes(ca, cb, summary)
        return
    matcher = difflib.SequenceMatcher(a=[_fingerprint(x) for x in old],
                                      b=[_fingerprint(x) for x in new], autojunk=False)
    for tag, i1, i2, j1, j2 in matcher.get_opcodes():
        if tag == "equal":
            continue  # structurally identical
        pairs = min(i2 - i1, j2 - j1)
        for k in range(pairs):
            _diff_nodes(old[i1 + k], new[j1 + k], summary)
        for ca in old[i1 + pairs:i2]:  # deletions charge 1 each
            summary.edited_node_count += 1
            summary.edited_lines.add(ca.line)
        line = old[i2 - 1].line if i2 > 0 else (old[0].line if old else anchor_line)
        for cb in new[j1 + pairs:j2]:  # insertions charge their subtree size
            summary.edited_node_count += n.node_count(cb)
            summary.edited_lines.add(line)


def validate_mutant_submission(original: n.SourceUnit, edited_source: str,
                               limits: MutantLimits | None = None) -> tuple[Mutant, AstEditSummary]:
    """Accept or reject an attacker's free edit of the unit source.

    Raises ValidationError with code syntax_error, type_error,
    signature_changed, function_added_or_removed, identical_to_original
    or edit_too_large.
    """
    limits = limits or MutantLimits()
    try:
        edited = parse_unit(edited_source, original.name)
    except ParseError as e:
        raise ValidationError("syntax_error", str(e), e.line) from e
    except SourceTooLarge as e:
        raise ValidationError("source_too_large", str(e)) from e
    errors = typecheck(edited)
    if errors:
        raise ValidationError("type_error", "; ".join(str(e) for e in errors), errors[0].line)
    orig_names = [f.name for f in original.functions]
    new_names = [f.name for f in edited.functions]
    if sorted(orig_names) != sorted(new_names):
        raise ValidationError("function_added_or_removed",
                              "mutants must keep the same set of functions")
    for f in original.functions:
        g = edited.function(f.name)
        if g.params != f.params or g.return_type != f.return_type:
            raise ValidationError("signature_changed",
                                  f"signature of {f.name!r} must not change", g.line)
    summary = ast_edit_summary(original, edited)
    if summary.edited_node_count == 0:
        raise ValidationError("identical_to_original", "edit does not change the program")
    if summary.edited_node_count > limits.max_edited_nodes:
        raise ValidationError(
            "edit_too_large",
            f"edit touches {summary.edited_node_count} nodes "
            f"(limit {limits.max_edited_nodes})")
    return Mutant(edited_source, edited, summary.edited_node_count,
                  set(summary.edited_lines)), summary
