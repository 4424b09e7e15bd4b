"""Exact computations for enumerative invariants of the ground field."""

__version__ = "0.1.0"
