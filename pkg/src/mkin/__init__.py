"""Generalized rotations, flexible motions and Euler-Savary checks in normed planes."""

from .plane import PlaneContext

__all__ = ["PlaneContext"]
__version__ = "0.1.0"
