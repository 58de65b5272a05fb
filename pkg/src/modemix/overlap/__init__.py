"""Mode overlap integrals and relative conversion efficiencies."""

from modemix.overlap.integral import (
    EfficiencyRow,
    Overlap,
    efficiency_table,
    overlap_integral,
    relative_efficiency,
    solve_triplet_modes,
)

__all__ = [
    "EfficiencyRow",
    "Overlap",
    "efficiency_table",
    "overlap_integral",
    "relative_efficiency",
    "solve_triplet_modes",
]
