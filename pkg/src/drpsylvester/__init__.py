"""Dispersion-relation-preserving stencils for linear advection and the
Sylvester-equation error analysis of the resulting schemes."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .scheme import (  # noqa: F401
    BoundaryData,
    GridSpec,
    SchemeCoefficients,
    effective,
    is_restricted,
    make_grid,
    preset_scheme,
)
from .spectral import (  # noqa: F401
    QuadratureSpec,
    SpatialTriple,
    StencilSpec,
    integrated_error,
    least_squares_optimal_coefficients,
    paper_optimal_coefficients,
)
