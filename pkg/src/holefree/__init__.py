"""Exact constructions and checkers for hole-free point sets near the
integer lattice."""

__version__ = "0.1.0"

from .geometry import (  # noqa: E402
    affine_dimension,
    general_position,
    high_above,
    interior_contains,
    orientation,
)
from .holes import is_hole_free, largest_empty_convex_polygon_2d, spread  # noqa: E402
from .construction import build_hd, build_planar, complete_superset, constants  # noqa: E402

__all__ = [
    "affine_dimension",
    "build_hd",
    "build_planar",
    "complete_superset",
    "constants",
    "general_position",
    "high_above",
    "interior_contains",
    "is_hole_free",
    "largest_empty_convex_polygon_2d",
    "orientation",
    "spread",
]
