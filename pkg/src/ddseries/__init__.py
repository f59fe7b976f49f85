"""Quadratic Gauss sums, twisted L-functions, a double Dirichlet series built
from quadratic twists, and weight-1/2 Eisenstein data for Gamma_0(4)."""

from ._common import PoleError, RegionError, TruncatedValue, UnsupportedError
from .arith import ALL_CHARS, CHI4, CHI4CHI8, CHI8, TRIV, Char8
from .coeffs import CoeffSequence
from .dds import RegionPoint, Z_eval, Z_repr_A, Z_repr_B

__version__ = "0.1.0"

__all__ = [
    "ALL_CHARS",
    "CHI4",
    "CHI4CHI8",
    "CHI8",
    "Char8",
    "CoeffSequence",
    "PoleError",
    "RegionError",
    "RegionPoint",
    "TRIV",
    "TruncatedValue",
    "UnsupportedError",
    "Z_eval",
    "Z_repr_A",
    "Z_repr_B",
]
