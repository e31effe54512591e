"""Exact-arithmetic certificates for arithmetic lattices, symmetric-power
representations, quadratic form invariants, surface-group bending, and
mod-p orbit separation."""

__version__ = "0.1.0"
