"""Numerical toolkit for sphere isometries of uniform algebras: rhombus
geometry, conformal peaking functions, the additive Bishop construction,
face distances, and isometry reconstruction on finite sup-norm spaces."""

from .algebra import AnalyticFunction, CircleGrid, FiniteFunction, certified_sup_norm, sharp_sup_norm
from .bishop import BishopOutput, additive_bishop, verify_distance_bounds
from .conformal import ConformalMap, build_pinch_map, build_rhombus_map
from .faces import MaximalFace, face_distance_disk_bounds, face_distance_finite, membership_M
from .peaking import Arc, localized_peak, two_point_interpolation
from .polygon import HEXAGON, RHOMBUS, Polygon
from .tingley import ReconstructedIsometry, build_extension, generate_oracle, recover_structure, verify_theorem

__version__ = "0.1.0"

__all__ = [
    "AnalyticFunction", "Arc", "BishopOutput", "CircleGrid", "ConformalMap", "FiniteFunction",
    "HEXAGON", "MaximalFace", "Polygon", "RHOMBUS", "ReconstructedIsometry",
    "additive_bishop", "build_extension", "build_pinch_map", "build_rhombus_map",
    "certified_sup_norm", "face_distance_disk_bounds", "face_distance_finite",
    "generate_oracle", "localized_peak", "membership_M", "recover_structure",
    "sharp_sup_norm", "two_point_interpolation", "verify_distance_bounds", "verify_theorem",
]
