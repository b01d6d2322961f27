"""Exception hierarchy shared by all zsf modules."""


class ZsfError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(ZsfError):
    """Invalid configuration value (bad grid size, tolerance, flag)."""


class DataError(ZsfError):
    """Malformed or inconsistent input data (zeros file, profiles)."""


class DomainError(ZsfError, ValueError):
    """Mathematical domain violation (log of non-positive value, etc.)."""


class NumericalError(ZsfError):
    """A numerical procedure failed to converge or produced an invalid step."""


class StageError(ZsfError):
    """A pipeline stage could not run or did not reach its tolerance."""
