"""Exact computations around homological stability of configuration spaces."""

__version__ = "0.1.0"
