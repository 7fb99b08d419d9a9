"""Exception types shared across the package.

The CLI maps these onto exit codes: ``ConfigError`` -> 1, ``DataError`` -> 2,
``NumericalError`` -> 3.
"""


class ConfigError(ValueError):
    """Invalid user configuration (orders, windows, grid ranges)."""


class DataError(ValueError):
    """Input data that violates a series contract."""


class ParseError(DataError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class GapError(DataError):
    """A calendar month inside the span has no observations."""


class LengthError(DataError):
    """Series too short (or wrong length) for the requested operation."""


class NumericalError(RuntimeError):
    """Estimation could not produce a usable result."""
