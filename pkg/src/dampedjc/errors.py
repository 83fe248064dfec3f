"""Exception and warning types shared across the package."""


class DampedJCError(Exception):
    """Base class for all package-specific errors."""


class ParamError(DampedJCError, ValueError):
    """Invalid physical parameters (e.g. mu <= nu, negative rates)."""


class DomainError(DampedJCError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class ShapeError(DampedJCError, ValueError):
    """Array argument has an incompatible shape or length."""


class TruncationError(DampedJCError):
    """The Fock cutoff is too small to represent the requested state."""


class StepError(DampedJCError):
    """A propagation step violates the configured step bound or produced
    an unphysical state."""


class NumericalError(DampedJCError):
    """A numerical routine failed to converge or returned non-finite data."""


class ConfigError(DampedJCError):
    """Invalid run configuration (CLI/harness level)."""


class TruncationWarning(UserWarning):
    """Occupation near the top of the truncated Fock space exceeded the
    guard threshold; results may be contaminated by the cutoff."""
