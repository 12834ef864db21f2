"""Principal p-frequency of the one-dimensional model problem and its sharpness construction."""
from .errors import DomainError, NonConvergence, PFreqError
from .gentrig import GenTrigTable, arcsin_p, cos_p, pi_p, sin_p, sincos_p
from .model1d import (EigenSolution, ModelParams, eigenvalue_by_shooting, eigenvalue_from_D,
                      rayleigh_min, rayleigh_quotient, solve)
from .numerics import Tolerance
from .sharpness import build_warp, convergence_study, quotient_on_domain, ricci_certificate

__version__ = "0.1.0"

__all__ = [
    "DomainError", "NonConvergence", "PFreqError", "GenTrigTable", "arcsin_p", "cos_p", "pi_p",
    "sin_p", "sincos_p", "EigenSolution", "ModelParams", "eigenvalue_by_shooting",
    "eigenvalue_from_D", "rayleigh_min", "rayleigh_quotient", "solve", "Tolerance", "build_warp",
    "convergence_study", "quotient_on_domain", "ricci_certificate", "__version__",
]
