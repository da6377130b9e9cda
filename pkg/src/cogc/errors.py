"""Base error type and diagnostic rendering shared by every stage."""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from cogc.syntax import Span


class CogcError(Exception):
    """Base error for cogc.

    ``code`` is the stable diagnostic code printed as ``error[CODE]``.
    """

    code = "Error"

    def __init__(self, message: str, span: Span | None = None) -> None:
        self.message = message
        self.span = span
        super().__init__(message)


def format_diagnostic(path: str, error: CogcError) -> str:
    """Render ``file:line:col: error[CODE]: message``."""
    span = error.span
    line, col = (span.line, span.column) if span is not None else (0, 0)
    return f"{path}:{line}:{col}: error[{error.code}]: {error.message}"
