"""Exception hierarchy shared by the library and the command line."""


class SqueezingError(Exception):
    """Base class for every error raised by this package."""


class InvalidArgumentError(SqueezingError, ValueError):
    pass


class DimensionMismatchError(SqueezingError, ValueError):
    pass


class SingularConditionError(SqueezingError, ArithmeticError):
    """Raised when a drive configuration makes a derived quantity undefined (e.g. Omega**2 == Omega'**2)."""


class NoSolutionError(SqueezingError, ArithmeticError):
    """A bracketed root search found no sign change."""

    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket


class AccuracyError(SqueezingError, RuntimeError):
    """The propagator could not reach the requested tolerance within its step budget."""

    def __init__(self, message, disagreement=None):
        super().__init__(message)
        self.disagreement = disagreement


class UndefinedDirectionError(SqueezingError, ValueError):
    """Mean spin too small to define a transverse plane."""


class ConfigError(SqueezingError, ValueError):
    pass
