"""Supersensitive transition layers in 1D and 2D viscous Burgers equations."""

__version__ = "0.1.0"
