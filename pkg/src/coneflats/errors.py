"""Exception types shared across the library."""


class ConeflatsError(Exception):
    """Base class for all library-specific errors."""


class DegenerateLine(ConeflatsError):
    """An isotropic line hit (or got too close to) the excluded locus rho(L) = L."""


class PoleError(ConeflatsError):
    """A rational loop was evaluated at one of its poles."""


class DegenerateMetric(ConeflatsError):
    """A metric coefficient is nonpositive where positivity is required."""


class DegenerateCongruence(ConeflatsError):
    """The enveloped quadric degenerated to a point."""


class CurvatureDegenerate(ConeflatsError):
    """A curvature normal blew up (lift coefficient q_i ~ 0)."""


class ProjectionSingular(ConeflatsError):
    """(F, t0) vanished; the projection to the sphere is undefined there."""


class StructureError(ConeflatsError):
    """A structural invariant (block shape, signature pattern) failed."""


class IntegrationError(ConeflatsError):
    """Frame integration produced non-finite values."""


class NumericalError(ConeflatsError):
    """Generic numerical failure (singular matrix, excessive rounding dust)."""


class MaskedPointError(ConeflatsError):
    """A per-point degeneracy was hit in strict (non-masking) mode.

    Carries the offending grid point so callers can report it.
    """

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class ConfigError(ConeflatsError):
    """A pipeline configuration failed validation."""
