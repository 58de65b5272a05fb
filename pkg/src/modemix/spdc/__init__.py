"""Down-conversion design helpers."""

from modemix.spdc.designer import (
    BandEntry,
    NeighborBand,
    PumpSpec,
    Separation,
    SeparationReport,
    band_separation_report,
    jsi,
    pump_envelope,
    pump_mode_neighbors,
)

__all__ = [
    "BandEntry",
    "NeighborBand",
    "PumpSpec",
    "Separation",
    "SeparationReport",
    "band_separation_report",
    "jsi",
    "pump_envelope",
    "pump_mode_neighbors",
]
