"""Numerical checks for supercyclicity obstructions of weighted composition operators."""

__version__ = "0.1.0"
