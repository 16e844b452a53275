"""Exception hierarchy shared by every module of the package."""


class KisinError(Exception):
    """Base class for all errors raised by kisinshape."""


class DomainError(KisinError, ArithmeticError):
    """Inverting zero in the field or a non-unit series."""


class InvalidInput(KisinError, ValueError):
    pass


class ClassificationError(KisinError):
    """A weight-difference vector admitted no string decomposition."""


class InvalidMove(KisinError, ValueError):
    pass


class ShapeError(KisinError, ValueError):
    pass


class BudgetError(KisinError):
    """A verification sweep would exceed its configured budget.

    ``coverage`` carries whatever partial statistics were gathered.
    """

    def __init__(self, message, coverage=None):
        super().__init__(message)
        self.coverage = coverage or {}


class PrecisionError(KisinError):
    """A finite-precision answer changed when the truncation was raised."""


class HypothesisError(KisinError):
    pass


class SchemaError(KisinError, ValueError):
    """A scenario record does not match its schema; ``path`` names the field."""

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
