"""
Error hierarchy.

Every failure the toolkit reports deliberately is a ``SolvkitError``.  Each
carries a human-readable ``detail`` and the process ``exit_code`` the CLI
uses for it (2 = usage or parse problem), so commands translate errors
uniformly instead of inspecting types.

Negative *answers* (not primitive, no solution found, inconsistent system)
are not errors: engines return result objects with a ``reason`` for those.
"""

from __future__ import annotations


class SolvkitError(ValueError):
    """Base class for all deliberate failures."""

    exit_code: int = 2

    def __init__(self, detail: str) -> None:
        super().__init__(detail)
        self.detail = detail


class WordSyntaxError(SolvkitError):
    """A word does not follow the word grammar."""

    def __init__(self, detail: str, position: int) -> None:
        super().__init__(f"{detail} at position {position}")
        self.position = position


class PolynomialSyntaxError(SolvkitError):
    """A Laurent polynomial could not be parsed."""


class ContextError(SolvkitError):
    """Rank/class outside the supported range, or a generator out of range."""


class UnboundVariableError(SolvkitError):
    """A variable has no image in a substitution."""


class GroupMismatchError(SolvkitError):
    """Operands live over different groups or coefficient groups."""


class ZeroElementError(SolvkitError):
    """An operation undefined on zero (or on the identity) received it."""


class NotPrimitiveError(SolvkitError):
    """A vector with gcd != 1 was given where a primitive one is required."""


class PreconditionError(SolvkitError):
    """Inputs violate a documented precondition."""


class InvariantViolation(SolvkitError):
    """An internal consistency check failed; this is a bug, not bad input."""

    exit_code = 3
