"""peglab: computational experiments on inscribed squares in PL curves."""

from .geom import (
    CylCurve,
    GeometryError,
    PLFunction,
    Polyline,
    Pt,
    area_under,
    cyl_area_under,
    cyl_is_simple,
    homology_degree,
    is_simple,
    lipschitz_constant,
    perturb_generic,
    signed_area,
    winding_number,
)

__all__ = [
    "CylCurve",
    "GeometryError",
    "PLFunction",
    "Polyline",
    "Pt",
    "area_under",
    "cyl_area_under",
    "cyl_is_simple",
    "homology_degree",
    "is_simple",
    "lipschitz_constant",
    "perturb_generic",
    "signed_area",
    "winding_number",
]

__version__ = "0.1.0"
