"""Euler-Maxwell high-frequency limit toolkit: symbols, spectra, resonances,
WKB profiles, Zakharov envelopes and stiff Euler-Maxwell runs."""

from .model import PlasmaParams, assemble_symbol, bilinear_B, source_G, sharp_transform

__all__ = ["PlasmaParams", "assemble_symbol", "bilinear_B", "source_G", "sharp_transform"]
__version__ = "0.1.0"
