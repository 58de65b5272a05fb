"""Guided-mode solver and mode utilities."""

from modemix.modes.field import (
    ModeField,
    classify_mode,
    inner_product,
    mode_intensity_image,
    normalize_fields,
    parity_defect,
)
from modemix.modes.solver import assemble_operator, solve_modes, vacuum_wavenumber

__all__ = [
    "ModeField",
    "classify_mode",
    "inner_product",
    "mode_intensity_image",
    "normalize_fields",
    "parity_defect",
    "assemble_operator",
    "solve_modes",
    "vacuum_wavenumber",
]
