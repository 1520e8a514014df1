from __future__ import annotations

import enum
from dataclasses import dataclass


class Severity(enum.Enum):
    ERROR = "error"
    WARNING = "warning"


# closed set of diagnostic codes emitted by the parsers
CODES = frozenset(
    {
        "LEX_ERROR",
        "SYNTAX_ERROR",
        "DUPLICATE_ID",
        "UNKNOWN_ACTION_KIND",
        "UNRESOLVED_ARC_ENDPOINT",
        "INVALID_DECLARATION",
        "SYNONYM_NORMALIZED",
        "MODEL_MISMATCH",
        "UNKNOWN_NODE_IN_REGION",
        "EMPTY_REGION",
        "DISCONNECTED_REGION",
        "DUPLICATE_EVENT_ID",
        "UNKNOWN_EVENT",
        "NON_MONOTONIC_TICK",
    }
)


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int

    def __post_init__(self) -> None:
        if self.line < 1 or self.column < 1:
            raise ValueError(f"span must be 1-based, got {self.line}:{self.column}")

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: Severity
    span: SourceSpan
    message: str
    code: str

    def __post_init__(self) -> None:
        if self.code not in CODES:
            raise ValueError(f"undocumented diagnostic code {self.code!r}")

    def __str__(self) -> str:
        return f"{self.span}: {self.severity.value} [{self.code}] {self.message}"


class ParseError(ValueError):
    """Raised when a source has at least one Error diagnostic."""

    def __init__(self, diagnostics: list[ParseDiagnostic]) -> None:
        self.diagnostics = list(diagnostics)
        errors = [d for d in self.diagnostics if d.severity is Severity.ERROR]
        super().__init__("\n".join(str(d) for d in errors) or "parse failed")

    @property
    def codes(self) -> list[str]:
        return [d.code for d in self.diagnostics if d.severity is Severity.ERROR]
