"""Numerical laboratory for length spectra of compact hyperbolic surfaces,
twisted Selberg/Ruelle zeta functions, and heat-trace identities."""

__version__ = "0.1.0"
