"""Exception types shared across the library."""


class HurwitzError(Exception):
    """Base class for all library-specific errors."""


class DegenerateFiber(HurwitzError):
    """The fiber angles are undefined because a required component vanishes."""


class SingularFiber(HurwitzError):
    """The requested base point lies on the singular half-axis of the chosen case."""


class SectionFailed(HurwitzError):
    """The constructed section did not reproduce the requested point/angles."""


class PolarSingularity(HurwitzError):
    """An Euler-angle operator was evaluated too close to sin(phi3) = 0."""


class SingularAxis(HurwitzError):
    """The closed-form potential diverges on the case's singular half-axis."""


class IllConditionedFrame(HurwitzError):
    """The frame determinant used to convert potentials is below threshold."""


class NoConventionFound(HurwitzError):
    """No octet-to-complex convention reproduced the quadratic map.

    Carries the best candidate seen and its residual for diagnosis.
    """

    def __init__(self, message, best_candidate=None, best_residual=None):
        super().__init__(message)
        self.best_candidate = best_candidate
        self.best_residual = best_residual


class ConfigInvalid(HurwitzError):
    """A suite configuration value is out of range or malformed."""
