"""Hand-rolled lexer for MiniLang."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError

KEYWORDS = {"fun", "var", "if", "else", "while", "return", "int", "bool", "true", "false"}

# Longest-match first.
SYMBOLS = [
    "->", "<=", ">=", "==", "!=", "&&", "||",
    "(", ")", "{", "}", "[", "]", ",", ";", ":",
    "+", "-", "*", "/", "%", "<", ">", "!", "=",
]


@dataclass
class Token:
    kind: str  # "ident", "int", "kw", symbol text, or "eof"
    text: str
    line: int
    col: int


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i = 0
    n = len(source)
    while i < n:
        c = source[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "#":  # line comment
            while i < n and source[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if c.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            tokens.append(Token("int", source[i:j], start_line, start_col))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            text = source[i:j]
            kind = "kw" if text in KEYWORDS else "ident"
            tokens.append(Token(kind, text, start_line, start_col))
            col += j - i
            i = j
            continue
        for sym in SYMBOLS:
            if source.startswith(sym, i):
                tokens.append(Token(sym, sym, start_line, start_col))
                i += len(sym)
                col += len(sym)
                break
        else:
            raise ParseError(line, col, f"unexpected character {c!r}")
    tokens.append(Token("eof", "", line, col))
    return tokens
