"""Recursive-descent parser for MiniLang.

Grammar (see docs/minilang.md for the full reference):

    unit     := { fundecl }
    fundecl  := "fun" ident "(" [ params ] ")" "->" type block
    params   := param { "," param } ; param := ident ":" type
    type     := "int" | "bool" | "int" "[" "]"
    block    := "{" { stmt } "}"
    stmt     := vardecl | assign | arrayassign | if | while | return
    vardecl  := "var" ident ":" type "=" expr ";"
    assign   := ident "=" expr ";"
    arrayassign := ident "[" expr "]" "=" expr ";"
    if       := "if" "(" expr ")" block [ "else" block ]
    while    := "while" "(" expr ")" block
    return   := "return" expr ";"

Expression precedence, loosest first:
    ||  <  &&  <  == !=  <  < <= > >=  <  + -  <  * / %  <  unary  <  primary
"""

from __future__ import annotations

from . import nodes as n
from .errors import ParseError, SourceTooLarge
from .lexer import Token, tokenize

MAX_SOURCE_BYTES = 64 * 1024


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    @property
    def cur(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.cur
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def error(self, message: str) -> ParseError:
        tok = self.cur
        return ParseError(tok.line, tok.col, message)

    def expect(self, kind: str, what: str | None = None) -> Token:
        if self.cur.kind != kind:
            raise self.error(f"expected {what or kind!r}, found {self.cur.text or 'end of input'!r}")
        return self.advance()

    def expect_kw(self, word: str) -> Token:
        if self.cur.kind != "kw" or self.cur.text != word:
            raise self.error(f"expected {word!r}, found {self.cur.text or 'end of input'!r}")
        return self.advance()

    def at_kw(self, word: str) -> bool:
        return self.cur.kind == "kw" and self.cur.text == word

    # --- declarations ---

    def unit(self) -> list[n.FunctionDecl]:
        functions = []
        while self.cur.kind != "eof":
            functions.append(self.fundecl())
        return functions

    def fundecl(self) -> n.FunctionDecl:
        start = self.expect_kw("fun")
        name = self.expect("ident", "function name").text
        self.expect("(")
        params: list[tuple[str, n.Type]] = []
        if self.cur.kind != ")":
            while True:
                pname = self.expect("ident", "parameter name").text
                self.expect(":")
                params.append((pname, self.type_ref()))
                if self.cur.kind != ",":
                    break
                self.advance()
        self.expect(")")
        self.expect("->")
        ret = self.type_ref()
        body = self.block()
        return n.FunctionDecl(start.line, start.col, name, params, ret, body)

    def type_ref(self) -> n.Type:
        if self.at_kw("int"):
            self.advance()
            if self.cur.kind == "[":
                self.advance()
                self.expect("]")
                return n.Type.INT_ARRAY
            return n.Type.INT
        if self.at_kw("bool"):
            self.advance()
            return n.Type.BOOL
        raise self.error("expected a type")

    # --- statements ---

    def block(self) -> list[n.Stmt]:
        self.expect("{")
        stmts = []
        while self.cur.kind != "}":
            if self.cur.kind == "eof":
                raise self.error("unterminated block")
            stmts.append(self.stmt())
        self.advance()
        return stmts

    def stmt(self) -> n.Stmt:
        tok = self.cur
        if self.at_kw("var"):
            self.advance()
            name = self.expect("ident", "variable name").text
            self.expect(":")
            typ = self.type_ref()
            self.expect("=")
            init = self.expr()
            self.expect(";")
            return n.VarDecl(tok.line, tok.col, name, typ, init)
        if self.at_kw("if"):
            self.advance()
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            then_body = self.block()
            else_body = None
            if self.at_kw("else"):
                self.advance()
                else_body = self.block()
            return n.If(tok.line, tok.col, cond, then_body, else_body)
        if self.at_kw("while"):
            self.advance()
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            body = self.block()
            return n.While(tok.line, tok.col, cond, body)
        if self.at_kw("return"):
            self.advance()
            value = self.expr()
            self.expect(";")
            return n.Return(tok.line, tok.col, value)
        if tok.kind == "ident":
            name = self.advance().text
            if self.cur.kind == "[":
                self.advance()
                index = self.expr()
                self.expect("]")
                self.expect("=")
                value = self.expr()
                self.expect(";")
                return n.ArrayAssign(tok.line, tok.col, name, index, value)
            self.expect("=")
            value = self.expr()
            self.expect(";")
            return n.Assign(tok.line, tok.col, name, value)
        raise self.error(f"expected a statement, found {tok.text or 'end of input'!r}")

    # --- expressions ---

    def expr(self) -> n.Expr:
        return self.binary(0)

    _LEVELS = [("||",), ("&&",), ("==", "!="), ("<", "<=", ">", ">="), ("+", "-"), ("*", "/", "%")]

    def binary(self, level: int) -> n.Expr:
        if level == len(self._LEVELS):
            return self.unary()
        left = self.binary(level + 1)
        while self.cur.kind in self._LEVELS[level]:
            op = self.advance()
            right = self.binary(level + 1)
            left = n.Binary(op.line, op.col, op.kind, left, right)
        return left

    def unary(self) -> n.Expr:
        tok = self.cur
        if tok.kind in ("-", "!"):
            self.advance()
            return n.Unary(tok.line, tok.col, tok.kind, self.unary())
        return self.postfix()

    def postfix(self) -> n.Expr:
        expr = self.primary()
        while self.cur.kind == "[":
            tok = self.advance()
            index = self.expr()
            self.expect("]")
            expr = n.Index(tok.line, tok.col, expr, index)
        return expr

    def primary(self) -> n.Expr:
        tok = self.cur
        if tok.kind == "int":
            self.advance()
            return n.IntLit(tok.line, tok.col, int(tok.text))
        if self.at_kw("true"):
            self.advance()
            return n.BoolLit(tok.line, tok.col, True)
        if self.at_kw("false"):
            self.advance()
            return n.BoolLit(tok.line, tok.col, False)
        if tok.kind == "(":
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner
        if tok.kind == "[":
            self.advance()
            elements = []
            if self.cur.kind != "]":
                elements.append(self.expr())
                while self.cur.kind == ",":
                    self.advance()
                    elements.append(self.expr())
            self.expect("]")
            return n.ArrayLit(tok.line, tok.col, elements)
        if tok.kind == "ident":
            self.advance()
            if self.cur.kind == "(":
                self.advance()
                args = []
                if self.cur.kind != ")":
                    args.append(self.expr())
                    while self.cur.kind == ",":
                        self.advance()
                        args.append(self.expr())
                self.expect(")")
                return n.Call(tok.line, tok.col, tok.text, args)
            return n.Var(tok.line, tok.col, tok.text)
        raise self.error(f"expected an expression, found {tok.text or 'end of input'!r}")


def parse_unit(source: str, name: str = "unit") -> n.SourceUnit:
    """Parse MiniLang source into a SourceUnit.

    Raises ParseError (with 1-based line/column) on malformed input and
    SourceTooLarge for inputs over 64 KiB.
    """
    if len(source.encode("utf-8")) > MAX_SOURCE_BYTES:
        raise SourceTooLarge(f"source exceeds {MAX_SOURCE_BYTES} bytes")
    functions = _Parser(tokenize(source)).unit()
    line_count = source.count("\n") + (0 if source.endswith("\n") or not source else 1)
    return n.SourceUnit(name, source, functions, max(line_count, 1))
