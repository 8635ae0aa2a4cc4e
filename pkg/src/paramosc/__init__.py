"""Invariants, rational extensions and exact dynamics of the parametric oscillator."""
__version__ = "0.1.0"
