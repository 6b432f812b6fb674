"""Exact-arithmetic singularity and uniqueness-domain atlas for planar
parallel mechanisms."""

__version__ = "0.1.0"
