"""Exception types shared across the package.

The split matters for the command line front end: domain violations map to
exit code 2, numerical failures to exit code 3.
"""


class SpikedWishartError(Exception):
    """Base class for package errors."""


class InputDomainError(SpikedWishartError, ValueError):
    """Raised when an argument lies outside the documented domain."""


class NumericalError(SpikedWishartError, RuntimeError):
    """Raised when a computation fails to reach its accuracy contract.

    Examples: a root count disagreeing with the interlacing prediction,
    quadrature that does not converge, or a degenerate eigenvalue tie in a
    sampler output (a probability-zero event that indicates breakage).
    """
