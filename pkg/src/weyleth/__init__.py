"""Weyl-symbol tools for the off-diagonal ETH function, with an LMG test bed."""

__version__ = "0.1.0"
