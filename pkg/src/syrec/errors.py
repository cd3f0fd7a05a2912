"""Exception types and diagnostics shared by the toolchain."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Tuple

Position = Tuple[int, int]


class SyrecError(Exception):
    """Base class for every error raised by this package.

    ``kind`` is a stable machine-readable tag (``"UnknownCharacter"``,
    ``"WidthMismatch"`` ...) that tests and the CLI can dispatch on.
    """

    kind = "Error"

    def __init__(self, message: str, pos: Optional[Position] = None, kind: Optional[str] = None):
        if kind is not None:
            self.kind = kind
        self.message = message
        self.pos = pos
        where = f"{pos[0]}:{pos[1]}: " if pos else ""
        super().__init__(f"{where}{message}")


class LexError(SyrecError):
    kind = "UnknownCharacter"


class ParseError(SyrecError):
    """Raised by the parser; ``expected`` holds the acceptable token kinds."""

    kind = "SyntaxError"

    def __init__(self, message: str, pos: Optional[Position] = None, expected: Iterable[str] = ()):
        self.expected = tuple(sorted(set(expected)))
        super().__init__(message, pos)


class EvalError(SyrecError):
    """Compile-time number evaluation failure."""


class SemanticError(SyrecError):
    """A program that parsed but cannot be given a meaning."""


class SynthesisError(SyrecError):
    pass


class SimulationError(SyrecError):
    pass


class RealFormatError(SyrecError):
    kind = "ParseError"


@dataclass(frozen=True)
class Diagnostic:
    kind: str
    message: str
    pos: Optional[Position] = None
    severity: str = "error"

    def format(self, filename: str = "<input>") -> str:
        line, col = self.pos if self.pos else (0, 0)
        return f"{filename}:{line}:{col}: {self.severity}: {self.message}"
