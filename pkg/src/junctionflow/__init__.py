"""Curvature flow of planar three-curve networks with triple-junction drag,
misorientation-dependent surface tensions and grain rotation."""

__version__ = "0.1.0"
