"""Exception types shared across the engine."""

from __future__ import annotations


class CausalogicError(Exception):
    """Base class for all engine errors."""


class ParseError(CausalogicError):
    """Malformed model, formula, or proof text."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class ValidationError(CausalogicError):
    """A structurally well-formed object violates its contract."""


class BudgetExceeded(CausalogicError):
    """An enumeration hit its configured cap before finishing.

    This is a distinct outcome, never a wrong answer: callers must treat
    it as "undecided at this budget".
    """

    def __init__(self, message: str, examined: int):
        self.examined = examined
        super().__init__(f"{message} (examined {examined})")


class TautologyCapExceeded(CausalogicError):
    """A tautology check saw more distinct atomic units than the cap allows."""

    def __init__(self, units: int, cap: int):
        self.units = units
        self.cap = cap
        super().__init__(f"tautology check over {units} atomic units exceeds cap {cap}")
