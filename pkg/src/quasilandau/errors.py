"""Exception types shared across the package."""


class QuasiLandauError(Exception):
    """Base class for all package errors."""


class DomainError(QuasiLandauError, ValueError):
    """A physical precondition fails (unconfined sector, kx <= 0, ...)."""


class GridError(QuasiLandauError, ValueError):
    """A grid is too small or too coarse for the requested quantity."""


class ArgumentError(QuasiLandauError, ValueError):
    """An argument is outside its documented range."""


class SupportSpillError(QuasiLandauError, RuntimeError):
    """Wave-function norm reached the outer edge of an unabsorbed grid."""


class ConfigError(QuasiLandauError, ValueError):
    """Configuration file or flag value is missing or malformed."""
