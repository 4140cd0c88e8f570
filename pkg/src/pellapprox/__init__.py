"""Exact quadratic arithmetic, simultaneous Pellian equations and effective
simultaneous approximation bounds for pairs of quadratic irrationals."""

__version__ = "0.1.0"
