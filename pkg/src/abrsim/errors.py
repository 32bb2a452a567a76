"""Exception hierarchy shared by all modules.

Each family carries the process exit code used by the command line driver.
"""


class AbrsimError(Exception):
    exit_code = 1


class ConfigError(AbrsimError, ValueError):
    """Invalid configuration, stimulus description or parameter value."""

    exit_code = 2


class DomainError(ConfigError):
    """A parameter lies outside the domain of an operation."""


class SpecError(ConfigError):
    """A stimulus description cannot be rendered."""


class DataError(AbrsimError, ValueError):
    """Input data is non-finite, malformed or of the wrong shape."""

    exit_code = 3


class HeaderError(DataError):
    pass


class TruncatedPayloadError(DataError):
    pass


class DimensionMismatchError(DataError):
    pass


class NumericalError(AbrsimError, ArithmeticError):
    """The requested computation is numerically degenerate."""

    exit_code = 4


class InstabilityError(NumericalError):
    pass


class DegenerateDelayError(NumericalError):
    pass


class CalibrationDegenerateError(NumericalError):
    pass
