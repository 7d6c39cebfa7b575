"""Barren-plateau analysis for unitary-embedded matrix product states."""
__version__ = "0.1.0"
