"""Exception types. Each carries a short machine-readable ``code``."""

from __future__ import annotations


class CyclorthError(ValueError):
    code = "error"

    def __init__(self, message: str, code: str | None = None):
        super().__init__(message)
        if code is not None:
            self.code = code


class NotPrimePowerError(CyclorthError):
    code = "not-a-prime-power"


class OrderTooLargeError(CyclorthError):
    code = "order-too-large"


class FieldZeroDivisionError(CyclorthError, ZeroDivisionError):
    code = "division-by-zero"


class ZeroArgumentError(CyclorthError):
    code = "zero-argument"


class DivisibilityError(CyclorthError):
    code = "divisibility-violation"


class ConstraintError(CyclorthError):
    """A construction's preconditions or side conditions failed."""

    code = "constraint-not-satisfied"


class NotOrthomorphismError(CyclorthError):
    code = "not-an-orthomorphism"


class BudgetExceededError(CyclorthError):
    code = "budget-exceeded"
