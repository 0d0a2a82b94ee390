"""Chess billiards: boundary dynamics of two alternating parallel foliations."""

from .geometry import (
    Circle,
    Domain,
    Ellipse,
    GeometryError,
    Polygon,
    QPoint,
    affinity_breakpoints,
    boundary_point,
    domain_from_json,
    fixed_set,
    involution,
    random_convex_polygon,
)
from .dynamics import (
    AffineCircleMap,
    ChessMap,
    Connection,
    Cylinder,
    RotationEstimate,
    detect_connection,
    find_periodic,
    fixed_points,
    has_fixed_point,
    is_semi_stable,
    lift_displacement,
    neutral_cylinders,
    omega_limit_sample,
    rotation_number,
    step_S,
    step_T,
    triangle_classify,
)

__all__ = [
    "AffineCircleMap",
    "ChessMap",
    "Circle",
    "Connection",
    "Cylinder",
    "Domain",
    "Ellipse",
    "GeometryError",
    "Polygon",
    "QPoint",
    "RotationEstimate",
    "affinity_breakpoints",
    "boundary_point",
    "detect_connection",
    "domain_from_json",
    "find_periodic",
    "fixed_points",
    "fixed_set",
    "has_fixed_point",
    "involution",
    "is_semi_stable",
    "lift_displacement",
    "neutral_cylinders",
    "omega_limit_sample",
    "random_convex_polygon",
    "rotation_number",
    "step_S",
    "step_T",
    "triangle_classify",
]
