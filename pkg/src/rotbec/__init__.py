"""Thomas-Fermi stationary states, linear stability and 3D dipolar GPE simulation
for a trapped dipolar condensate whose polarisation rotates in the plane."""

from .core_model import SystemParams, TFState
from .errors import (CapabilityError, ConvergenceError, DomainError, NotFoundError, NumericError,
                     PreconditionError, RotBecError, UnstableRegimeError)

__version__ = "0.1.0"

__all__ = [
    "SystemParams", "TFState", "RotBecError", "DomainError", "ConvergenceError",
    "UnstableRegimeError", "NotFoundError", "CapabilityError", "PreconditionError", "NumericError",
    "__version__",
]
