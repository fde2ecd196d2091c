"""
pointspec - Spectral Analysis of Solvable One-Point Interaction Models.

Numerical toolkit for 1D Schrodinger operators with nonlocal point
interactions: Weyl-Titchmarsh functions, eigenvalues with multiplicities,
exceptional points, spectral singularities, embedded eigenvalues,
eigenfunctions, symmetry flags and a finite-difference cross-check.

Version: 0.1.0
"""

__version__ = "0.1.0"
__author__ = "pointspec Team"
