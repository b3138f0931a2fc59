"""Exception types shared across the library.

Two families matter to callers: bad inputs or parameters (``InputError``,
a ``ValueError``) and numeric degeneracies discovered during a computation
(``NumericError``, an ``ArithmeticError``).  The CLI maps the first family
to exit code 2 and the second to exit code 4.
"""


class InputError(ValueError):
    """Invalid argument: wrong shape, domain violation, or mismatch."""


class NumericError(ArithmeticError):
    """A computation degenerated (zero spectrum, log of zero, ...)."""


class PsdViolationError(NumericError):
    """An eigenvalue fell below the tolerated negative floor."""
