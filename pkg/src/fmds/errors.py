"""Exception types shared across the package."""


class FmdsError(Exception):
    """Base class for every error raised by this package."""


class InvalidDomain(FmdsError):
    """Degenerate or reversed spline domain."""


class InvalidKnots(FmdsError):
    """Interior breakpoints are not strictly increasing inside the domain."""


class OutOfDomain(FmdsError):
    """Evaluation point lies outside the spline domain."""


class Underdetermined(FmdsError):
    """Fewer sample points than basis functions in a least-squares fit."""


class IllConditioned(FmdsError):
    """Least-squares design matrix is numerically rank deficient."""


class ShapeError(FmdsError):
    """Array arguments have mismatched or invalid shapes/indices."""


class DegenerateSeries(FmdsError):
    """A series has zero variance, so its correlation is undefined."""


class WindowTooLong(FmdsError):
    """Rolling window does not fit the panel."""


class DimError(FmdsError):
    """Requested embedding dimension is out of range."""


class NumericalError(FmdsError):
    """A numerical routine failed to converge."""


class InsufficientObjects(FmdsError):
    """Fewer than two objects: no pairs to fit."""


class ConfigError(FmdsError):
    """Invalid configuration value."""


class IngestError(FmdsError):
    """Malformed input file."""


class DivergedError(FmdsError):
    """Optimization produced a non-finite or exploding objective."""

    def __init__(self, message: str, epoch: int):
        super().__init__(message)
        self.epoch = epoch
