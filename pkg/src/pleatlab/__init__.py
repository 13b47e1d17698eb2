"""pleatlab: numeric and exact tools for bending and smoothing hypersurfaces in hyperbolic space."""

from .errors import (
    BracketError,
    ConfigurationError,
    DomainError,
    GeometryError,
    InconclusiveError,
    IntegrationError,
    PleatlabError,
)
from .hyperboloid import (
    BoundaryPoint,
    HPoint,
    Hyperplane,
    LorentzVector,
    TangentVector,
    dist,
    geodesic_point,
    hyperplane_angle,
    lorentz_inner,
    project_to_hyperplane,
    push_off,
    separates,
)

__version__ = "0.1.0"

__all__ = [
    "BoundaryPoint",
    "BracketError",
    "ConfigurationError",
    "DomainError",
    "GeometryError",
    "HPoint",
    "Hyperplane",
    "InconclusiveError",
    "IntegrationError",
    "LorentzVector",
    "PleatlabError",
    "TangentVector",
    "dist",
    "geodesic_point",
    "hyperplane_angle",
    "lorentz_inner",
    "project_to_hyperplane",
    "push_off",
    "separates",
]
