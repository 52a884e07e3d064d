"""Underwater acoustic RPL simulator with SWARA-weighted parent selection."""

__version__ = "0.1.0"
