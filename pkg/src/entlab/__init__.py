"""Numerical laboratory for entanglement entropy: bipartite states and
optimal truncation, exact Gaussian harmonic chains, infinite-system DMRG,
angular-wave quantization with a thermal horizon spectrum, and the
Kruskal-Szekeres chart."""

__version__ = "0.1.0"
