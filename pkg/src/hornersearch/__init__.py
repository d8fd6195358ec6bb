"""Horner scheme search for multivariate polynomials with CSE-aware op counts."""

from .expr import OpCount, ParseError, Polynomial, parse
from .hornerform import Direction, HornerScheme, apply_scheme

__all__ = [
    "Direction",
    "HornerScheme",
    "OpCount",
    "ParseError",
    "Polynomial",
    "apply_scheme",
    "parse",
]
__version__ = "0.1.0"
