"""Certification engine for two trigonometric and hyperbolic inequalities."""
__version__ = "0.1.0"
