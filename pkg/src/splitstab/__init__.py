"""Local energy stability laboratory for split-form DGSEM discretizations.

Burgers and 2D Euler semidiscretizations on LGL summation-by-parts
operators, finite-difference Jacobian spectra, explicit Runge-Kutta time
integration and an experiment driver.
"""

from .dg_euler2d import BACKEND
from .sbp import Mesh1D, SbpOperatorSet, build_lgl_operators

__version__ = "0.1.0"

__all__ = ["BACKEND", "Mesh1D", "SbpOperatorSet", "build_lgl_operators", "__version__"]
