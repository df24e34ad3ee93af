"""Trace and Schatten-norm estimation: exact oracle, one-clean-qubit
simulation, classical random walks and the supporting graph models."""

from .config import Settings, configure
from .errors import SchattenLabError
from .functions import SpectralFunction, abs_pow_p, pow_p
from .hamiltonian import LocalTerm, LogLocalHamiltonian, MatrixClass, SparseHermitian
from .report import EstimateReport

__version__ = "0.1.0"

__all__ = [
    "EstimateReport",
    "LocalTerm",
    "LogLocalHamiltonian",
    "MatrixClass",
    "SchattenLabError",
    "Settings",
    "SparseHermitian",
    "SpectralFunction",
    "abs_pow_p",
    "configure",
    "pow_p",
]
