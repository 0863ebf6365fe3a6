"""Domain errors.

Input problems are business errors: they are reported to the user and never
retried. Resource exhaustion and engine misuse are process errors.
"""

from __future__ import annotations

from typing import Any

from mbu_rpa_core.exceptions import BusinessError, ProcessError

from helpers.context_handler import current, describe

# ----------------------
# Business errors
# ----------------------


class ParseError(BusinessError):
    """Syntax error in program source."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None) -> None:
        self.line = line
        self.column = column
        location = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{location}")


class ValidationError(BusinessError):
    """Program is well-formed but violates a static rule."""


class EvaluationError(BusinessError):
    """Expression cannot be evaluated, e.g. integer division by zero."""


class OverlappingGuards(BusinessError):
    """Two commands are enabled in the same reachable state."""

    def __init__(self, message: str, state: dict[str, int] | None = None) -> None:
        self.state = state
        super().__init__(message)


class OutOfDomainUpdate(BusinessError):
    """An update drives a variable outside its declared domain."""

    def __init__(self, message: str, state: dict[str, int] | None = None, command: int | None = None) -> None:
        self.state = state
        self.command = command
        super().__init__(message)


class EmptyInit(BusinessError):
    """The init expression has no satisfying evaluation."""


class InvalidConfig(BusinessError):
    """Invalid generator or run configuration."""


# ----------------------
# Process errors
# ----------------------


class BudgetError(ProcessError):
    """Base for resource budget breaches, tagged with the construction phase."""

    def __init__(self, message: str, phase: str | None = None) -> None:
        self.phase = phase if phase is not None else current("phase")
        self.where = describe()
        suffix = f" during {self.phase}" if self.phase else ""
        super().__init__(f"{message}{suffix}")


class NodeLimitExceeded(BudgetError):
    """A fresh node would exceed the table's node limit."""


class TimeBudgetExceeded(BudgetError):
    """The wall-clock budget ran out."""


class ConstructionFailed(ProcessError):
    """An iterative reordering step could not construct its model."""

    def __init__(
        self,
        iteration: int,
        cause: Exception | None = None,
        rows: list[Any] | None = None,
        order: Any = None,
    ) -> None:
        self.iteration = iteration
        self.cause = cause
        self.rows = rows or []
        self.order = order
        super().__init__(f"Construction failed at iteration {iteration}: {cause}")


class KindMismatch(ProcessError):
    """Boolean and real-valued diagrams mixed in one operation."""


class SupportViolation(ProcessError):
    """A diagram mentions a bit outside the declared support."""


class IncompleteAssignment(ProcessError):
    """An assignment does not cover a bit on the evaluated path."""


class ExplicitBoundExceeded(ProcessError):
    """Explicit enumeration would exceed the caller's state bound."""
