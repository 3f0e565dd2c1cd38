"""Invariants, developables and singularities of surfaces glued along a curve."""
from .errors import GeometryError

__version__ = "0.1.0"

__all__ = ["GeometryError", "__version__"]
