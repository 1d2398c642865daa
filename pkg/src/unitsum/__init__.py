"""Sums of units: unit sum number criteria, unit-sum searches in quadratic
orders, the polytope volumes c_{n,s}, two-unit matrix decompositions over
Euclidean-division rings, and counts of unit sums."""

__version__ = "0.1.0"

from .errors import DomainError, Unverifiable  # noqa: E402

__all__ = ["DomainError", "Unverifiable", "__version__"]
