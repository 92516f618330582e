"""Spectra of hyperbolic algebraic integers, their counting matrices and limit measures."""

__version__ = "0.1.0"

from .algebraic import (  # noqa: F401
    LatticePoint,
    MinimalPolynomial,
    NumberField,
    analyze_field,
    apply_T,
    apply_T_inverse,
    embed,
    field_from,
    in_box,
    parse_polynomial,
)
