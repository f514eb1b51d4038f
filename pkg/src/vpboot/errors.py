"""Exception hierarchy shared across the package."""


class VpbootError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(VpbootError):
    """Malformed or inconsistent input: bad shapes, labels, or file contents."""


class DegenerateDataError(VpbootError):
    """Structurally valid data that is statistically unusable.

    Examples: a table whose every entry is zero, a regression with no
    residual degrees of freedom, or a bootstrap run whose failure budget
    is exhausted.
    """


class ReproductionCheckError(VpbootError):
    """A reproduction run finished but its trend or correlation checks failed."""
