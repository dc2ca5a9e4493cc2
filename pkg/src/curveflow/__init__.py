"""Symmetry algebras, thermodynamic states and curve lifting for inviscid
flow on a curve."""

__version__ = "0.1.0"
