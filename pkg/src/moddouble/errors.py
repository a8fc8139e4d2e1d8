"""Exception hierarchy shared by all modules."""


class ModDoubleError(Exception):
    """Base class for every error raised by the package."""


class NonConvergence(ModDoubleError):
    """Quadrature refinement stalled before reaching the requested tolerance."""


class EndpointMass(ModDoubleError):
    """Integrand is not negligible at the truncation ends of the contour."""


class LadderDivergence(ModDoubleError):
    """Regulated values did not stabilize along the regulator ladder."""


class DomainViolation(ModDoubleError):
    """Parameters lie outside the convergence domain of an integral identity."""


class NearSingularity(ModDoubleError):
    """Argument falls inside the exclusion disc of a pole or zero of gamma.

    Attributes
    ----------
    location : complex
        Lattice point that triggered the exclusion.
    factor : str
        Optional label of the offending factor in a composite expression.
    """

    def __init__(self, message, location=None, factor=""):
        super().__init__(message)
        self.location = location
        self.factor = factor


class DegreeOverflow(ModDoubleError):
    """Polynomial part of a test function exceeded the degree cap."""


class SchemaMismatch(ModDoubleError):
    """A report file does not conform to the report schema."""


class ConfigError(ModDoubleError):
    """Invalid run configuration."""
