"""Isolating weight functions for perfect matchings on genus-g grid graphs,
with supporting machinery: cycle oracles, determinant-based matching
procedures, polygonal-schema normalization, and graph double covers."""

__version__ = "0.1.0"
