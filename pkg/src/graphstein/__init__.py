"""Multivariate normal approximation via Stein couplings: graph homogeneity
testing and permutation statistics."""

__version__ = "0.1.0"
