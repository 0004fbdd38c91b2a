"""Number variance of zeros of Gaussian random polynomials on complex projective space."""

__version__ = "0.1.0"

from .errors import (
    DegenerateSystem,
    DiagonalEvaluation,
    NearBoundaryZero,
    PoleError,
    PreconditionError,
    QuadratureError,
    RootAtInfinity,
    RootFindingFailure,
    SingularityError,
    SolverAbort,
    ZerovarError,
)
from .geometry import Annulus, Ball, Disk, Rectangle, boundary_volume, domain_volume
from .ensemble import SeedSpec, RandomPolynomial, sample, sample_system
from .variance import (
    expected_count,
    nu_constant,
    predicted_variance,
    variance_boundary_exact,
    variance_bulk_exact,
)

__all__ = [
    "ZerovarError",
    "PreconditionError",
    "RootAtInfinity",
    "NearBoundaryZero",
    "DegenerateSystem",
    "RootFindingFailure",
    "PoleError",
    "SingularityError",
    "DiagonalEvaluation",
    "QuadratureError",
    "SolverAbort",
    "Disk",
    "Annulus",
    "Rectangle",
    "Ball",
    "domain_volume",
    "boundary_volume",
    "SeedSpec",
    "RandomPolynomial",
    "sample",
    "sample_system",
    "expected_count",
    "nu_constant",
    "predicted_variance",
    "variance_boundary_exact",
    "variance_bulk_exact",
]
