"""Exception hierarchy shared across the package.

The CLI maps these onto distinct exit codes, so new error conditions
should subclass one of the four leaf categories rather than raising
bare exceptions.
"""


class EmsError(Exception):
    """Base class for all package errors."""


class ConfigError(EmsError):
    """Invalid or missing configuration (config file, flags, parameters)."""


class DataError(EmsError):
    """Invalid input data (profiles, scenarios, fleet files)."""


class GapError(DataError):
    """A time series has missing timestamps; carries the gap ranges."""

    def __init__(self, message: str, gaps=None):
        super().__init__(message)
        self.gaps = list(gaps or [])


class InfeasibleError(EmsError):
    """The optimization problem admits no feasible schedule."""

    def __init__(self, message: str, hint: str = ""):
        super().__init__(message)
        self.hint = hint


class SolverError(EmsError):
    """The solver backend failed or returned an unusable status."""
