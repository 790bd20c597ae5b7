"""Simulation lab for coset-state unclonable encryption and copy-protection."""

__version__ = "0.1.0"
