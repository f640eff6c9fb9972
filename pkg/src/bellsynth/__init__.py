"""Numerical model of a polarization-entanglement concentrator built from type-II SPDC.

Modules
-------
qstate        two-qubit density matrices and entanglement measures
dispersion    Sellmeier indices, group velocities and the D, D+ parameters
biphoton      joint spectral amplitude and its time-domain transform Pi(t+, t-)
concentrator  coincidence rates, sweeps and the output polarization state
expsim        detector event streams, coincidence histograms and tomography
cli           configuration-driven command-line front end
"""

from .errors import (
    BellSynthError,
    ConfigError,
    DomainError,
    InvariantError,
    MisuseError,
    ResolutionError,
    ShiftRangeError,
)
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BellSynthError",
    "ConfigError",
    "DomainError",
    "InvariantError",
    "MisuseError",
    "ResolutionError",
    "ShiftRangeError",
    "__version__",
]
