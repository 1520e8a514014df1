from __future__ import annotations

import typing as t

from ..core import Scalar
from .diagnostics import ParseDiagnostic, ParseError, Severity, SourceSpan
from .lexer import LexError, Token, TokenType, tokenize


class _Abort(Exception):
    """Unwinds the parser after a fatal diagnostic."""


class TokenStream:
    def __init__(self, source: str, file: str) -> None:
        self.file = file
        self.diagnostics: list[ParseDiagnostic] = []
        try:
            self.tokens = tokenize(source)
        except LexError as exc:
            self.tokens = []
            self.diagnostics.append(
                ParseDiagnostic(
                    Severity.ERROR, SourceSpan(file, exc.line, exc.column), str(exc), "LEX_ERROR"
                )
            )
        self.pos = 0

    @property
    def ok(self) -> bool:
        return bool(self.tokens)

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def at_end(self) -> bool:
        return self.current.type is TokenType.EOF

    def advance(self) -> Token:
        tok = self.current
        if tok.type is not TokenType.EOF:
            self.pos += 1
        return tok

    def check(self, ttype: TokenType, text: str | None = None) -> bool:
        tok = self.current
        return tok.type is ttype and (text is None or tok.text == text)

    def accept(self, ttype: TokenType, text: str | None = None) -> Token | None:
        if self.check(ttype, text):
            return self.advance()
        return None

    def expect(self, ttype: TokenType, text: str | None = None, what: str | None = None) -> Token:
        tok = self.accept(ttype, text)
        if tok is None:
            wanted = what or (repr(text) if text else ttype.value)
            self.fail(f"expected {wanted}, found {self._describe(self.current)}")
        return tok  # type: ignore[return-value]

    @staticmethod
    def _describe(tok: Token) -> str:
        return tok.type.value if tok.type is TokenType.EOF else repr(tok.text)

    def span(self, tok: Token | None = None) -> SourceSpan:
        tok = tok or self.current
        return SourceSpan(self.file, tok.line, tok.column)

    def report(self, code: str, message: str, tok: Token | None = None, *, warning: bool = False) -> None:
        severity = Severity.WARNING if warning else Severity.ERROR
        self.diagnostics.append(ParseDiagnostic(severity, self.span(tok), message, code))

    def fail(self, message: str, tok: Token | None = None, code: str = "SYNTAX_ERROR") -> t.NoReturn:
        self.report(code, message, tok)
        raise _Abort()

    def literal(self) -> Scalar:
        tok = self.current
        if tok.type in (TokenType.INT, TokenType.STRING):
            self.advance()
            return tok.value
        if tok.type is TokenType.IDENT and tok.text in ("true", "false", "none"):
            self.advance()
            return {"true": True, "false": False, "none": None}[tok.text]
        self.fail(f"expected a literal, found {self._describe(tok)}")

    def path(self) -> tuple[str, Token]:
        first = self.expect(TokenType.IDENT, what="a node path")
        parts = [first.text]
        while self.check(TokenType.DOT):
            self.advance()
            parts.append(self.expect(TokenType.IDENT, what="a path segment").text)
        return ".".join(parts), first

    def has_errors(self) -> bool:
        return any(d.severity is Severity.ERROR for d in self.diagnostics)

    def raise_if_errors(self) -> None:
        if self.has_errors():
            raise ParseError(self.diagnostics)
