"""Exact experiments on divisibility of linear recurrences by polynomials."""

__version__ = "0.1.0"
