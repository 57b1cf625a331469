"""Exact cohomological numerology and verification of Ulrich bundles on P^n."""

__version__ = "0.1.0"
