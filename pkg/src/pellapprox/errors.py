"""Exception hierarchy.

Every error carries a CLI exit code so the command layer can map failures
without inspecting messages.
"""


class PellApproxError(Exception):
    exit_code = 1


class InvalidInput(PellApproxError, ValueError):
    exit_code = 2


class InvalidRadicand(InvalidInput):
    """Radicand is a perfect square or below 2."""


class IncompatibleFields(InvalidInput):
    """Binary operation on elements with different radicands."""


class PrecisionCeilingError(PellApproxError, ArithmeticError):
    """A decision could not be made before the precision ceiling."""

    exit_code = 3


class InvariantViolation(PellApproxError, AssertionError):
    """A theorem-backed check failed; this indicates a bug."""

    exit_code = 4
