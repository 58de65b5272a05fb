"""Phase matching: mismatch, degenerate roots, poling period and band maps."""

from modemix.phasematching.bandmap import (
    BandMap,
    CrossSection,
    WavelengthRange,
    band_map,
    degenerate_scan,
    smear_band_map,
    smear_profile,
)
from modemix.phasematching.qpm import (
    DEFAULT_SEARCH_WINDOW_NM,
    band_fwhm,
    band_slope,
    degenerate_mismatch,
    degenerate_wavelength,
    fit_poling_period,
    phase_matching_intensity,
    phase_mismatch,
    sinc_squared,
    sum_frequency_wavelength,
    wavenumber_bracket,
)

__all__ = [
    "BandMap",
    "CrossSection",
    "WavelengthRange",
    "band_map",
    "degenerate_scan",
    "smear_band_map",
    "smear_profile",
    "DEFAULT_SEARCH_WINDOW_NM",
    "band_fwhm",
    "band_slope",
    "degenerate_mismatch",
    "degenerate_wavelength",
    "fit_poling_period",
    "phase_matching_intensity",
    "phase_mismatch",
    "sinc_squared",
    "sum_frequency_wavelength",
    "wavenumber_bracket",
]
