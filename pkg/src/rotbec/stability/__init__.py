"""Linear stability of rotating-frame Thomas-Fermi states on a polynomial basis."""

from .basis import PolyBasis, monomials
from .operator import (DEFAULT_NMAX, MAP_COLUMNS, MapPoint, StabilitySpectrum, assemble_L,
                       instability_timescale, spectrum, stability_map)
from .potential import EllipsoidPoly, ellipsoid_potential, k_operator

__all__ = [
    "PolyBasis", "monomials", "EllipsoidPoly", "ellipsoid_potential", "k_operator",
    "StabilitySpectrum", "assemble_L", "spectrum", "stability_map", "instability_timescale",
    "MapPoint", "MAP_COLUMNS", "DEFAULT_NMAX",
]
