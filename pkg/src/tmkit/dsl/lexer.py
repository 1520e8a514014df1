from __future__ import annotations

import enum
import re
import typing as t
from dataclasses import dataclass


class TokenType(enum.Enum):
    IDENT = "identifier"
    INT = "integer"
    STRING = "string"
    ARROW = "'->'"
    SQUIGGLE = "'~>'"
    LBRACE = "'{'"
    RBRACE = "'}'"
    LBRACKET = "'['"
    RBRACKET = "']'"
    DOT = "'.'"
    COMMA = "','"
    COLON = "':'"
    SEMI = "';'"
    EQUALS = "'='"
    EOF = "end of input"


@dataclass(frozen=True)
class Token:
    type: TokenType
    text: str
    line: int
    column: int

    @property
    def value(self) -> t.Any:
        if self.type is TokenType.INT:
            return int(self.text)
        if self.type is TokenType.STRING:
            return _unescape(self.text[1:-1])
        return self.text


class LexError(ValueError):
    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(message)
        self.line = line
        self.column = column


_SPEC = [
    ("WS", r"[ \t\r\n]+"),
    ("COMMENT", r"#[^\n]*"),
    ("STRING", r'"(?:[^"\\\n]|\\.)*"'),
    ("INT", r"-?[0-9]+"),
    ("IDENT", r"[A-Za-z_][A-Za-z0-9_]*"),
    ("ARROW", r"->"),
    ("SQUIGGLE", r"~>"),
    ("LBRACE", r"\{"),
    ("RBRACE", r"\}"),
    ("LBRACKET", r"\["),
    ("RBRACKET", r"\]"),
    ("DOT", r"\."),
    ("COMMA", r","),
    ("COLON", r":"),
    ("SEMI", r";"),
    ("EQUALS", r"="),
]
_MASTER = re.compile("|".join(f"(?P<{name}>{rx})" for name, rx in _SPEC))
_ESCAPES = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}


def _unescape(body: str) -> str:
    return re.sub(r"\\(.)", lambda m: _ESCAPES.get(m.group(1), m.group(1)), body)


def quote(text: str) -> str:
    body = text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    return f'"{body}"'


def tokenize(source: str) -> list[Token]:
    """Split ``source`` into tokens; whitespace and comments are dropped."""
    tokens: list[Token] = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(source):
        match = _MASTER.match(source, pos)
        if match is None:
            col = pos - line_start + 1
            if source[pos] == '"':
                raise LexError("unterminated string literal", line, col)
            raise LexError(f"unexpected character {source[pos]!r}", line, col)
        kind = match.lastgroup
        text = match.group()
        if kind not in ("WS", "COMMENT"):
            tokens.append(Token(TokenType[kind], text, line, pos - line_start + 1))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rindex("\n") + 1
        pos = match.end()
    tokens.append(Token(TokenType.EOF, "", line, pos - line_start + 1))
    return tokens
