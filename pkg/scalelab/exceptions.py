"""
Exceptions for scalelab.

All exceptions generated by this library will descend from ScaleLabError.
"""


class ScaleLabError(Exception):
    """Base Exception for this module."""


class DomainError(ScaleLabError, ValueError):
    """A parameter lies outside the domain of an operation."""


class NumericalError(ScaleLabError, ArithmeticError):
    """A numerical procedure failed to reach its tolerance.

    :param str message: Human-readable description.
    :param dict diagnostics: Values that help locating the failure (offending
        mass, error estimate, node counts, ...).
    """

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics

    def __str__(self):
        message = super().__str__()
        if not self.diagnostics:
            return message
        details = ", ".join(
            f"{key}={value!r}" for key, value in sorted(self.diagnostics.items())
        )
        return f"{message} ({details})"


class ScalingLimitError(ScaleLabError):
    """A scaling-limit computation could not produce any estimate."""


class ConfigError(ScaleLabError):
    """Error parsing or validating a run configuration.

    :param list errors: ``(field path, message)`` pairs.
    :param int line: Line of a YAML syntax error, if any.
    """

    def __init__(self, message, errors=None, line=None):
        super().__init__(message)
        self.errors = list(errors or [])
        self.line = line
