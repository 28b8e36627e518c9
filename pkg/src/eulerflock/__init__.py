"""Simulation and diagnostics for 1D Euler alignment dynamics with commutator forcing."""

__version__ = "0.1.0"
