"""Value types shared across modemix."""

from modemix.models.config import (
    CRYSTAL_AXES,
    DepthShape,
    GaugeSettings,
    LateralShape,
    PhaseMatchingSettings,
    SolverSettings,
    WaveguideSpec,
)
from modemix.models.labels import ModeLabel, Orientation, Polarization, Triplet

__all__ = [
    "CRYSTAL_AXES",
    "DepthShape",
    "GaugeSettings",
    "LateralShape",
    "PhaseMatchingSettings",
    "SolverSettings",
    "WaveguideSpec",
    "ModeLabel",
    "Orientation",
    "Polarization",
    "Triplet",
]
