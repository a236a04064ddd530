"""Equivariant disc potentials of toric fibers, the pinched-torus gluing and
Morse complexes on Borel-construction approximations.

Exact rational arithmetic throughout, except for the critical-point solver and
the flow-line ODE check, which run in double precision.
"""

from .errors import (
    ContextError,
    DataError,
    DomainError,
    EqdiscError,
    NumericError,
    ShapeError,
    StructuralError,
    ValidationError,
)
from .series import (
    SeriesContext,
    TruncatedSeries,
    exp_series,
    log_series,
    reverse_family,
    substitute,
)
from .toric import ToricInput, enumerate_effective, relation_lattice, validate, wall_curve_classes
from .mirror import corrected_coefficients, g_function, mirror_map
from .potential import build_potential, critical_points, evaluate
from .immersed import glue, sphere_potential
from .borel_morse import build_complex, cohomology_ranks, flow_verify

__version__ = "0.1.0"

__all__ = [
    "ContextError",
    "DataError",
    "DomainError",
    "EqdiscError",
    "NumericError",
    "ShapeError",
    "StructuralError",
    "ValidationError",
    "SeriesContext",
    "TruncatedSeries",
    "exp_series",
    "log_series",
    "reverse_family",
    "substitute",
    "ToricInput",
    "enumerate_effective",
    "relation_lattice",
    "validate",
    "wall_curve_classes",
    "corrected_coefficients",
    "g_function",
    "mirror_map",
    "build_potential",
    "critical_points",
    "evaluate",
    "glue",
    "sphere_potential",
    "build_complex",
    "cohomology_ranks",
    "flow_verify",
]
