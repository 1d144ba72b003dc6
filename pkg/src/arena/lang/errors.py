"""Error types shared by the MiniLang front end and interpreter."""

from __future__ import annotations

from dataclasses import dataclass


class LangError(Exception):
    """Base class for all MiniLang errors."""

    code = "lang_error"


class ParseError(LangError):
    """Syntax error with the 1-based position of the first offending token."""

    code = "syntax_error"

    def __init__(self, line: int, col: int, message: str):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col
        self.message = message


class SourceTooLarge(LangError):
    code = "source_too_large"


@dataclass
class CheckError:
    """A single type-checking violation."""

    line: int
    message: str
    code: str = "type_error"

    def __str__(self) -> str:
        return f"line {self.line}: {self.message}"


class TypeCheckFailed(LangError):
    """Raised by check_unit when one or more CheckErrors were found."""

    code = "type_error"

    def __init__(self, errors: list[CheckError]):
        super().__init__("; ".join(str(e) for e in errors))
        self.errors = errors


class UnknownFunction(LangError):
    code = "unknown_function"


class ArityOrTypeMismatch(LangError):
    code = "arity_or_type_mismatch"
