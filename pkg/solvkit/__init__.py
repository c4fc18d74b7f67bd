"""Solvkit — exact symbolic computation in free solvable groups."""

__version__ = "0.1.0"
