"""File layouts written and read by modemix."""

SCHEMA_VERSION = 1

BAND_MAP_COLUMNS = ("lambda_V_nm", "lambda_H_nm", "intensity", "valid")
CROSS_SECTION_COLUMNS = ("lambda_nm", "intensity")
SCAN_COLUMNS = ("lambda_nm", "intensity")
PROFILE_COLUMNS = ("x_um", "y_um", "n")
EFFICIENCY_COLUMNS = (
    "triplet",
    "degenerate_wavelength_nm",
    "overlap",
    "calculated_eff",
    "measured_eff",
)
MODE_SUMMARY_COLUMNS = ("label", "n_eff", "residual", "dominant_fraction")
BAND_CENTER_COLUMNS = ("triplet", "degenerate_wavelength_nm", "fwhm_nm")
MEASURED_EFFICIENCY_COLUMNS = ("triplet", "measured_eff")
ASSIGNMENT_COLUMNS = ("scan", "center_nm", "triplet", "predicted_nm", "residual_nm", "flagged")
SEPARATION_COLUMNS = (
    "triplet",
    "center_nm",
    "fwhm_nm",
    "nearest",
    "nearest_separation_nm",
    "isolated",
)

KIND_BAND_MAP = "band_map"
KIND_CROSS_SECTION = "cross_section"
KIND_JSI = "joint_spectral_intensity"
KIND_MODES = "modes"
KIND_PROFILE = "index_profile"
KIND_IDENTIFICATION = "identification_report"
KIND_SEPARATION = "separation_report"
