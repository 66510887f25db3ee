"""Exact rational geometry of divisorial polytopes."""

from .polytope import Halfspace, Polytope, simplex_volume, triangulate, intersect
from .divisorial import (
    GENERIC,
    INFINITY,
    ONE,
    ZERO,
    AffinePiece,
    Cell,
    ConditionResult,
    DivisorialPolytope,
    FiberPolytope,
    MarkedPoint,
    Param,
    PLFunction,
    ValidationReport,
    admissible_points,
    degree,
    fiber_bounds,
    special_fiber,
    subdivision_cells,
    validate,
)
from .symmetry import Symmetry, fixed_subspace, symmetries
