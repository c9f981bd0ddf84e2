"""Exception hierarchy shared across the package."""


class SnsmartError(Exception):
    """Base class for every error raised by this package."""


class DataError(SnsmartError, ValueError):
    """Input data or configuration cannot be used."""


class ParseError(DataError):
    """A participant file row is malformed."""


class ConsistencyError(DataError):
    """A record or count table violates a design invariant."""


class ConfigError(DataError):
    """A study, scenario, prior or MCMC configuration is invalid."""


class DomainError(SnsmartError, ValueError):
    """A numerical routine was called outside its domain."""


class OptimizationError(SnsmartError, RuntimeError):
    pass


class QuadratureError(SnsmartError, RuntimeError):
    pass


class StudyError(SnsmartError, RuntimeError):
    """Too many replications of a Monte Carlo study failed."""
