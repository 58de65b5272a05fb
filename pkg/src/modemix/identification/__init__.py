"""Band identification from measured degenerate scans."""

from modemix.identification.assignment import (
    FLAG_THRESHOLD_NM,
    AssignmentReport,
    BandAssignment,
    assign_triplets,
    predict_centers,
)
from modemix.identification.fitting import (
    CorrectionDifference,
    corrections_from_differences,
    fit_correction_differences,
    observed_combination,
    pair_differences,
)
from modemix.identification.pipeline import IdentificationResult, gauge_anchors, identify_bands
from modemix.identification.scan import MeasuredScan, detect_band_centers, synthesize_scan

__all__ = [
    "FLAG_THRESHOLD_NM",
    "AssignmentReport",
    "BandAssignment",
    "assign_triplets",
    "predict_centers",
    "CorrectionDifference",
    "corrections_from_differences",
    "fit_correction_differences",
    "observed_combination",
    "pair_differences",
    "IdentificationResult",
    "gauge_anchors",
    "identify_bands",
    "MeasuredScan",
    "detect_band_centers",
    "synthesize_scan",
]
