"""Exception hierarchy shared by all engines."""


class EqdiscError(Exception):
    """Base class for every error raised by this package."""


class ContextError(EqdiscError):
    """Two series were combined although their variable contexts differ."""


class DomainError(EqdiscError):
    """An operation was applied outside its formal domain (e.g. log of a non-unit)."""


class ShapeError(EqdiscError):
    """A series family does not have the 'variable times unit' shape."""


class ValidationError(EqdiscError):
    """Toric input data failed validation.

    ``index`` names the offending ray or cone when there is one.
    """

    def __init__(self, message, index=None, report=None):
        super().__init__(message)
        self.index = index
        self.report = report


class DataError(EqdiscError):
    """Input data is well-formed but unusable (e.g. a Mori generator of non-positive area)."""


class NumericError(EqdiscError):
    """A floating point routine failed; ``diagnostics`` carries solver details."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class StructuralError(EqdiscError):
    """A cochain complex violates delta**2 == 0."""
