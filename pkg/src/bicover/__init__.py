"""Exact invariants, classifications and lattice data for bidouble covers of minimal rational surfaces."""

__version__ = "0.1.0"
