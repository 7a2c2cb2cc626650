"""Octonion and Cayley-Dickson polar forms."""

__version__ = "0.1.0"
