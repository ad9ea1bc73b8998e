"""Exception types shared across the package."""


class CoaxsimError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(CoaxsimError, ValueError):
    """Malformed or inconsistent configuration input."""


class ConvergenceError(CoaxsimError, RuntimeError):
    """An iterative routine failed to converge.

    The best estimate found so far, if any, is attached as ``best``.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class CutoffError(CoaxsimError, ValueError):
    """A basis truncation is too small for the requested accuracy."""
