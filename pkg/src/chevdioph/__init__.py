"""Chevalley groups over finite and symbolic rings, with equation reductions."""

__version__ = "0.1.0"
