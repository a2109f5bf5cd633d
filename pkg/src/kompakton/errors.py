"""Exception types shared across the package."""


class KompaktonError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(KompaktonError):
    """A scalar argument is outside its admissible range."""


class ConfigurationError(KompaktonError):
    """An experiment setup is internally inconsistent."""


class ConfigParseError(ConfigurationError):
    """Config text could not be parsed; carries key and line context."""

    def __init__(self, message, key=None, line=None):
        super().__init__(message)
        self.key = key
        self.line = line


class LinearSolveError(KompaktonError):
    """The periodic banded system could not be solved reliably."""


class StepFailureError(KompaktonError):
    """A single implicit step did not produce an acceptable state."""

    def __init__(self, message, report=None, reason="newton"):
        super().__init__(message)
        self.report = report
        self.reason = reason  # "newton" | "non-finite"


class InsufficientDataError(KompaktonError):
    """Too few usable samples for a requested fit."""


class AnalysisError(KompaktonError):
    """A measurement could not be carried out on the given data."""
