"""Diagnostics shared by the parsers, validators, engine and lints."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class SourcePosition:
    """1-based line/column into the decoded character stream of an input file."""

    file: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    code: str
    message: str
    position: SourcePosition | None = None
    subject_id: str | None = None

    def render(self) -> str:
        """One human-readable line, e.g. ``error[DANGLING_FLOW] m.fis:3:14: ...``."""
        where = f" {self.position}:" if self.position else ""
        who = f" ({self.subject_id})" if self.subject_id else ""
        return f"{self.severity.value}[{self.code}]{where} {self.message}{who}"


def error(code: str, message: str, position: SourcePosition | None = None,
          subject_id: str | None = None) -> Diagnostic:
    return Diagnostic(Severity.ERROR, code, message, position, subject_id)


def warning(code: str, message: str, position: SourcePosition | None = None,
            subject_id: str | None = None) -> Diagnostic:
    return Diagnostic(Severity.WARNING, code, message, position, subject_id)


def has_errors(diagnostics: Iterable[Diagnostic]) -> bool:
    return any(d.severity is Severity.ERROR for d in diagnostics)
