"""Exception and warning classes shared across the package."""


class GridError(ValueError):
    """Raised when arrays do not match their grid or grids do not match each other."""


class PreconditionError(ValueError):
    """Raised when an operation is called outside its documented domain."""


class NotWindowedError(PreconditionError):
    """Raised when a space-time field does not decay at the edges of its time window."""


class NumericalFailure(RuntimeError):
    """Divergence of an iteration or a blow-up guard tripping inside a time stepper."""


class ResolutionWarning(UserWarning):
    """The grid is too coarse for the requested projection or quadrature."""
