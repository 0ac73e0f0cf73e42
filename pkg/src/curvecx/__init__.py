"""Curve graphs of punctured surfaces, flat structures, finite covers and
hyperbolicity checks on finite metric spaces."""
from .surface import PuncturedSurface, build_surface, catalog, load_surface
from .curves import CurveClass, intersection_number, normalize, self_intersection

__all__ = ["PuncturedSurface", "build_surface", "catalog", "load_surface",
           "CurveClass", "intersection_number", "normalize", "self_intersection"]
__version__ = "0.1.0"
