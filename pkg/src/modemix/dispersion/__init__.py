"""Intermodal dispersion: geometric corrections and effective-index backends."""

from modemix.dispersion.intermodal import (
    CorrectionsIndexProvider,
    GeometricCorrections,
    IndexProvider,
    SolverIndexProvider,
    effective_index,
    extract_corrections,
    solve_at,
)

__all__ = [
    "CorrectionsIndexProvider",
    "GeometricCorrections",
    "IndexProvider",
    "SolverIndexProvider",
    "effective_index",
    "extract_corrections",
    "solve_at",
]
