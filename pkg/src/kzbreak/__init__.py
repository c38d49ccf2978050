"""Simulation and scaling analysis of Kibble-Zurek breakdown under fast,
finite-range quenches in a Landau-Zener qubit and the Rice-Mele model."""

__version__ = "0.1.0"

from .errors import (AccuracyError, ConfigError, DegenerateHamiltonianError, DomainError,
                     ExtractionError, InsufficientDataError, KzError, StiffnessError,
                     UnsupportedRegimeError)
from .hamiltonian import QuenchProtocol, eigensystem, khz, minimum_gap
from .states import QubitState

__all__ = [
    "AccuracyError", "ConfigError", "DegenerateHamiltonianError", "DomainError",
    "ExtractionError", "InsufficientDataError", "KzError", "StiffnessError",
    "UnsupportedRegimeError", "QuenchProtocol", "QubitState", "eigensystem", "khz",
    "minimum_gap", "__version__",
]
