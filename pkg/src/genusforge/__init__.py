"""Genus symbols of integral lattices: enumeration, extraction and construction."""

from .construct import maximal_overlattice, representative
from .genus import GenusSymbol, enumerate_genera, format_symbol, is_valid, parse_symbol, symbol_of, symbol_of_gram
from .lattice import Lattice

__version__ = "0.1.0"

__all__ = [
    "GenusSymbol",
    "Lattice",
    "enumerate_genera",
    "format_symbol",
    "is_valid",
    "maximal_overlattice",
    "parse_symbol",
    "representative",
    "symbol_of",
    "symbol_of_gram",
]
