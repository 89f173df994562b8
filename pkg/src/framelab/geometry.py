"""Phase-space geometry: the plane with twisted translations and the affine half-plane.

Half-plane distances use the metric |dz|/y, whose balls have
``dx dy / y**2``-area ``4 pi sinh(r/2)**2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

PLANE = "plane"
HALFPLANE = "halfplane"
GEOMETRIES = (PLANE, HALFPLANE)


def check_geometry(geometry: str) -> str:
    g = geometry.replace("-", "").lower()
    if g not in GEOMETRIES:
        raise ValueError(f"unknown geometry {geometry!r}")
    return g


def geometry_code(geometry: str) -> int:
    return GEOMETRIES.index(check_geometry(geometry))


@dataclass(frozen=True)
class PhasePoint:
    x: float
    y: float
    geometry: str = PLANE

    def __post_init__(self):
        object.__setattr__(self, "geometry", check_geometry(self.geometry))
        if self.geometry == HALFPLANE and not self.y > 0:
            raise ValueError("half-plane points need y > 0")

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)


def identity(geometry: str) -> PhasePoint:
    return PhasePoint(0.0, 1.0, HALFPLANE) if check_geometry(geometry) == HALFPLANE else PhasePoint(0.0, 0.0)


# -- affine group ---------------------------------------------------------------


def affine_compose(z0: PhasePoint, z: PhasePoint) -> PhasePoint:
    """z0 . z = y0 z + x0."""
    return PhasePoint(z0.y * z.x + z0.x, z0.y * z.y, HALFPLANE)


def affine_inverse(z: PhasePoint) -> PhasePoint:
    return PhasePoint(-z.x / z.y, 1.0 / z.y, HALFPLANE)


def affine_inverse_apply(z0: PhasePoint, z: PhasePoint) -> PhasePoint:
    """z0^-1 . z = (z - x0) / y0."""
    return PhasePoint((z.x - z0.x) / z0.y, z.y / z0.y, HALFPLANE)


# -- distances --------------------------------------------------------------------


def pseudo_hyperbolic(z1: complex, z2: complex):
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    return np.abs((z1 - z2) / (z1 - np.conj(z2)))


def hyperbolic_distance_xy(x1, y1, x2, y2):
    """Vectorised hyperbolic distance  log((1 + d) / (1 - d))  with d pseudo-hyperbolic."""
    arg = 1.0 + ((x1 - x2) ** 2 + (y1 - y2) ** 2) / (2.0 * y1 * y2)
    return np.arccosh(np.maximum(arg, 1.0))


def hyperbolic_distance(z1: PhasePoint, z2: PhasePoint) -> float:
    if z1.geometry != HALFPLANE or z2.geometry != HALFPLANE:
        raise ValueError("hyperbolic distance needs two half-plane points")
    return float(hyperbolic_distance_xy(z1.x, z1.y, z2.x, z2.y))


def distance(z1: PhasePoint, z2: PhasePoint) -> float:
    if z1.geometry != z2.geometry:
        raise ValueError("mixed-geometry distance")
    if z1.geometry == PLANE:
        return math.hypot(z1.x - z2.x, z1.y - z2.y)
    return hyperbolic_distance(z1, z2)


def distance_xy(x1, y1, x2, y2, geometry: str):
    if check_geometry(geometry) == PLANE:
        return np.hypot(np.subtract(x1, x2), np.subtract(y1, y2))
    return hyperbolic_distance_xy(x1, y1, x2, y2)


# -- measures -------------------------------------------------------------------


def hyperbolic_ball_area(r: float) -> float:
    if r <= 0:
        raise ValueError("radius must be positive")
    return 4.0 * math.pi * math.sinh(r / 2.0) ** 2


def ball_area(r: float, geometry: str) -> float:
    if check_geometry(geometry) == PLANE:
        if r <= 0:
            raise ValueError("radius must be positive")
        return math.pi * r * r
    return hyperbolic_ball_area(r)


def measure_weight(z: PhasePoint) -> float:
    return 1.0 if z.geometry == PLANE else 1.0 / (z.y * z.y)


def measure_weight_xy(y, geometry: str):
    y = np.asarray(y, dtype=float)
    if check_geometry(geometry) == PLANE:
        return np.ones_like(y)
    return 1.0 / (y * y)


# -- twisted translation --------------------------------------------------------


def twisted_phase(x0: float, y0: float, y):
    return np.exp(2j * math.pi * x0 * (np.asarray(y) - y0))


def twisted_translate(F, z0: PhasePoint):
    """F_{z0}(z) = exp(2 pi i x0 (y - y0)) F(z - z0) for a callable F(x, y)."""
    if z0.geometry != PLANE:
        raise ValueError("twisted translation lives on the plane")
    x0, y0 = z0.x, z0.y

    def shifted(x, y):
        return twisted_phase(x0, y0, y) * F(np.asarray(x) - x0, np.asarray(y) - y0)

    return shifted
