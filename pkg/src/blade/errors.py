"""Exception hierarchy shared by the codec, table builder and CLI."""


class BladeError(Exception):
    """Base class for all errors raised by this package."""


class ContractViolation(BladeError, ValueError):
    """An argument is outside the documented domain of an operation."""


class UnsupportedConfiguration(BladeError, ValueError):
    """The requested block size or code would not fit the fixed-width tables."""


class CorruptStreamError(BladeError):
    """The bitstream ended early or does not decode under the given tables."""


class TableFormatError(BladeError):
    """A serialized table artifact could not be parsed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class TableValidationError(BladeError):
    """A table parsed correctly but breaks a structural invariant."""
