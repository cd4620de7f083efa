"""Exception types shared across the package."""


class SgldiffError(Exception):
    """Base class for all package-specific errors."""


class InvalidParameterError(SgldiffError, ValueError):
    """An argument violates a documented precondition."""


class SamplingFailureError(SgldiffError, RuntimeError):
    """A rejection sampler exhausted its retry budget."""


class DivergenceError(SgldiffError, RuntimeError):
    """A simulated state became non-finite.

    Carries the first time at which the state was non-finite.
    """

    def __init__(self, message: str, time: float):
        super().__init__(message)
        self.time = time


class DomainTooSmallError(SgldiffError, ValueError):
    """A quadrature domain does not contain the effective support."""


class ConfigError(SgldiffError, ValueError):
    """An experiment configuration is invalid."""
