"""Invariant-domain-preserving IMEX solver for 1D gray radiation hydrodynamics."""

__version__ = "0.1.0"
