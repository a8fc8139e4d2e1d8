"""Modular quantum dilogarithm, the modular double of SL_q(2, R) and its 3j-symbol, with residual checks."""

__version__ = "0.1.0"

from .errors import (ConfigError, DegreeOverflow, DomainViolation, EndpointMass, LadderDivergence, ModDoubleError,
                     NearSingularity, NonConvergence, SchemaMismatch)
from .qdilog import ModularParams, gamma, gamma_array
from .reports import ResidualReport

__all__ = [
    "__version__", "ModularParams", "gamma", "gamma_array", "ResidualReport",
    "ModDoubleError", "NonConvergence", "EndpointMass", "LadderDivergence", "DomainViolation",
    "NearSingularity", "DegreeOverflow", "SchemaMismatch", "ConfigError",
]
