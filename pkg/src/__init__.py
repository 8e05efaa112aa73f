"""
Finite-field simplex census toolkit.
"""

__version__ = "0.1.0"
