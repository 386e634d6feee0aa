"""Finite duality toolkit: lattices and their dual spaces, step-wise free
algebras, and quantifier layers over finite models."""

from __future__ import annotations

from . import duality, errors, fo, gamma, layers, modal, order, presented
from .errors import CapExceeded, InconsistentPresentation, ParseError
from .order import FinBoolAlg, FinDistLattice, FinPoset, MonotoneMap

__all__ = [
    "duality",
    "errors",
    "fo",
    "gamma",
    "layers",
    "modal",
    "order",
    "presented",
    "CapExceeded",
    "InconsistentPresentation",
    "ParseError",
    "FinBoolAlg",
    "FinDistLattice",
    "FinPoset",
    "MonotoneMap",
]

__version__ = "0.1.0"
