"""Tightness-radius estimates for tubes around Reeb orbits of
three-dimensional contact sub-Riemannian structures."""

__version__ = "0.1.0"
