"""Spherical directly-connected antenna array (DCAA) ISAC simulation toolkit."""

__version__ = "0.1.0"

from .fundamentals import (
    SPEED_OF_LIGHT,
    Direction,
    ElementPattern,
    Orientation,
    dirichlet_kernel,
    element_gain,
    rotation_matrix,
    wave_vector,
)
from .geometry import DcaaLayout, DesignSpec, design_layout

__all__ = [
    "SPEED_OF_LIGHT",
    "Direction",
    "ElementPattern",
    "Orientation",
    "DcaaLayout",
    "DesignSpec",
    "design_layout",
    "dirichlet_kernel",
    "element_gain",
    "rotation_matrix",
    "wave_vector",
]
