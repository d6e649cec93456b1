"""Exact Sp(2g) representation theory and Johnson-homomorphism images of
abelian cycles built from disjoint bounding pair maps."""

__version__ = "0.1.0"
