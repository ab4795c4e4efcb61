"""Radial oscillator ladder algebra and its complex Darboux deformation on a grid.

Submodules
----------
specfun    Laguerre polynomials, series 1F1, Simpson weights
grid       uniform grids, grid functions, 6th-order finite differences
canonical  eigenbasis, first-order factors a, b and the S ladder operators
darboux    complex factorization, deformed potential and states, M and N
verify     identity residual suites producing verification reports
cli        command-line entry point ``radosc``
"""

__version__ = "0.1.0"

from ._kernels import BACKEND  # noqa: E402
from .canonical import EigenLabel, phi_closed_form  # noqa: E402
from .darboux import ComplexFactorization, psi_from_phi  # noqa: E402
from .grid import DEFAULT_GRID, DEFAULT_WINDOW, GridFunction, RadialGrid, WindowSpec  # noqa: E402
from .report import VerificationReport  # noqa: E402

__all__ = [
    "__version__",
    "BACKEND",
    "EigenLabel",
    "phi_closed_form",
    "ComplexFactorization",
    "psi_from_phi",
    "DEFAULT_GRID",
    "DEFAULT_WINDOW",
    "GridFunction",
    "RadialGrid",
    "WindowSpec",
    "VerificationReport",
]
