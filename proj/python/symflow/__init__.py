"""Exact symmetry and conservation-law checks for the coupled Hirota system."""

from ._symflow import (
    Expr,
    SymflowError,
    acceptance,
    conservation,
    euler_lagrange,
    finite_transform,
    manifest,
    optimal_system,
    parse,
    reduce,
    systems,
    total_derivative,
    verify_symmetry,
    zero_curvature,
)

__all__ = [
    "Expr",
    "SymflowError",
    "acceptance",
    "conservation",
    "euler_lagrange",
    "finite_transform",
    "manifest",
    "optimal_system",
    "parse",
    "reduce",
    "systems",
    "total_derivative",
    "verify_symmetry",
    "zero_curvature",
]
