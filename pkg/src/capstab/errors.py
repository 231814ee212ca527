"""Exception types shared across the package."""


class CapstabError(Exception):
    """Base class for all package errors."""


class GridTooCoarse(CapstabError):
    """Profile grid has fewer samples than the minimum supported."""


class NonPositiveRadius(CapstabError):
    """Radial coordinate is <= 0 at a sample that is not a designated axis endpoint."""


class AxisEndpoint(CapstabError):
    """A wall-only operation was called on an axis endpoint."""


class IntegrationBlowup(CapstabError):
    """Profile integration ran into the axis at an interior point."""


class MaxLengthExceeded(CapstabError):
    """Profile integration exceeded the allowed arclength budget."""


class NoMatch(CapstabError):
    """Shooting residual could not be driven below tolerance inside the bracket."""


class BracketInvalid(CapstabError):
    """Shooting bracket does not enclose a sign change of the residual."""


class SolverFailure(CapstabError):
    """Eigenvalue solver failed to converge."""


class PerturbationTooLarge(CapstabError):
    """A variation offset pushed the surface through a wall or the axis."""


class DimensionUnsupported(CapstabError):
    """Operation is only defined for a specific hypersurface dimension."""


class NoSignChange(CapstabError):
    """The vertical Gauss-map component does not change sign on this surface."""


class SchemaMismatch(CapstabError):
    """A report file does not match the expected schema or config hash."""


class ConfigError(CapstabError):
    """Run configuration is invalid."""
