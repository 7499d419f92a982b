"""Exception hierarchy."""


class PathkinError(Exception):
    """Base class for library errors."""


class DomainError(PathkinError, ValueError):
    """A parameter lies outside the domain of a path or formula."""


class PreconditionError(PathkinError, ValueError):
    """Inputs violate an operation's precondition (e.g. base-point mismatch)."""


class NumericError(PathkinError, ArithmeticError):
    """Non-finite values encountered during evaluation."""


class DegenerateDirectionError(PathkinError, ValueError):
    """A null vector was used where a non-null direction is needed.

    The relative energy then cannot be tied to a single component; it is
    spread over all components of the momentum.
    """


class ConfigurationError(PathkinError, ValueError):
    """A scenario or configuration is incomplete or invalid."""


class InvalidParticleError(PathkinError, ValueError):
    """Particle data is inconsistent (zero mass function, bad time map)."""


class InternalConsistencyError(PathkinError):
    """Two independent evaluations of the same identity disagree."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class AccuracyWarning(UserWarning):
    """A stencil fell back to a lower-accuracy one-sided form."""
