"""Symbolic verification engine and numerical integrator for coupled
Painleve VI systems with affine Weyl group symmetry of type D6(1)."""

__version__ = "0.1.0"
