"""Equidistribution of Galois orbits of torsion points over rational polytopes."""

__version__ = "0.1.0"
