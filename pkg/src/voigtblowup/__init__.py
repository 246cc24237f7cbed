"""Euler-Voigt and BBM pseudospectral solvers with an alpha-scaling blow-up analysis."""

__version__ = "0.1.0"
