"""Exception hierarchy shared by every module."""

from __future__ import annotations


class MvlamError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(MvlamError, SyntaxError):
    """Malformed term, type or certificate text.

    ``lineno`` and ``offset`` follow the :class:`SyntaxError` convention
    (1-based line and column).
    """

    def __init__(self, message: str, line: int, column: int, text: str | None = None):
        MvlamError.__init__(self, f"{message} at line {line}, column {column}")
        self.msg = message
        self.lineno = line
        self.offset = column
        self.text = text

    def __str__(self) -> str:
        return f"{self.msg} at line {self.lineno}, column {self.offset}"


class DomainError(MvlamError, ValueError):
    """An integer parameter (radix, index, arity) is out of range."""


class TableError(MvlamError, ValueError):
    """A function table is malformed or does not fit the requested builder."""


class SizeGuardExceeded(MvlamError):
    """A synthesis request would exceed the configured size guard."""


class ArityError(MvlamError, ValueError):
    """Composition of terms whose declared arities do not line up."""


class WiringError(MvlamError, ValueError):
    """Argument wiring for a hybrid composition is invalid."""


class DegenerateRadixWarning(UserWarning):
    """A radix of 1 was accepted; every such domain has a single value."""


class CompileError(MvlamError):
    """A case-study compilation step failed."""


class EvalError(MvlamError):
    """Evaluation did not produce a canonical value.

    ``reason`` is one of ``"non-canonical"``, ``"not-value-shaped"`` or
    ``"fuel-exhausted"``.
    """

    def __init__(self, reason: str, detail: str = ""):
        super().__init__(f"{reason}: {detail}" if detail else reason)
        self.reason = reason
        self.detail = detail


class TypingError(MvlamError):
    """Base class for type-checking failures; ``path`` locates the node."""

    kind = "TypingError"

    def __init__(self, message: str, path: tuple[int, ...] = ()):
        super().__init__(message)
        self.message = message
        self.path = tuple(path)

    def __str__(self) -> str:
        return f"{self.kind} at {list(self.path)}: {self.message}"


class LinearityError(TypingError):
    kind = "LinearityError"


class TypeMismatch(TypingError):
    kind = "TypeMismatch"


class BadDirective(TypingError):
    kind = "BadDirective"
