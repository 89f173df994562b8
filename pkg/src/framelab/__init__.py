"""framelab: numerics for irregular Gabor and wavelet frames."""

from ._accel import backend
from .geometry import HALFPLANE, PLANE, PhasePoint
from .signals import DEFAULT_Q, QuadratureSpec, Signal, from_descriptor

__all__ = [
    "DEFAULT_Q",
    "HALFPLANE",
    "PLANE",
    "PhasePoint",
    "QuadratureSpec",
    "Signal",
    "backend",
    "from_descriptor",
]

__version__ = "0.1.0"
