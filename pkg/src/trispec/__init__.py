"""Certified enclosures of low Dirichlet Laplacian eigenvalues of triangles.

Two-stage certification: a nonconforming finite-element pass separates the
low spectrum and produces guaranteed lower bounds, then a method-of-particular-
solutions pass refines each eigenvalue to a narrow certified enclosure.  The
moduli layer propagates enclosures of eigenvalue quotients along segments in
the space of triangle shapes and discharges sign conditions needed for the
existence proof driver.
"""

from .interval import Interval, precision, set_precision, get_precision

__all__ = ["Interval", "precision", "set_precision", "get_precision"]

__version__ = "0.1.0"
