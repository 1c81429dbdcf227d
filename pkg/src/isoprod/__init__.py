"""Isotropic curvature invariants of production-function graph hypersurfaces."""

__version__ = "0.1.0"
