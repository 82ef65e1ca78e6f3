"""Shared exception types.

Every error carries a short machine-parsable ``category`` string; the CLI
prints ``error:<category>: <message>`` on a single line and exits non-zero.
"""


class SmrError(Exception):
    category = "error"


class IoError(SmrError):
    """File missing or unreadable."""

    category = "io"


class FormatError(SmrError):
    """Bad magic, bad dimensions, or unparseable/non-finite payload."""

    category = "format"


class RangeError(SmrError):
    """Index or size parameter outside its valid range."""

    category = "range"


class ShapeError(SmrError):
    """Inputs whose dimensions must agree do not."""

    category = "shape"


class DataError(SmrError):
    """Dataset violates a statistical precondition (empty, too small, ...)."""

    category = "data"


class NumericsError(SmrError):
    """A computation produced a non-finite value."""

    category = "numerics"


class CoverageError(SmrError):
    """A per-query input is missing for a query that requires one."""

    category = "coverage"


class SpecError(SmrError):
    """A scenario specification is internally inconsistent."""

    category = "spec"
