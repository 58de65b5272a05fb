"""Measured degenerate scans: peak picking and a forward model for synthetic scans."""

import logging
import math
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import find_peaks

from modemix.dispersion import IndexProvider
from modemix.errors import ScanValidationError
from modemix.models import Triplet
from modemix.phasematching import WavelengthRange, degenerate_scan, smear_profile

logger = logging.getLogger(__name__)

DEFAULT_MIN_PROMINENCE = 0.05


@dataclass(frozen=True, eq=False)
class MeasuredScan:
    """Normalized intensity along λ_V = λ_H for one coupling configuration."""

    wavelength_nm: np.ndarray
    intensity: np.ndarray
    name: str = ""
    description: str = ""
    date: str = ""
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        wl = np.asarray(self.wavelength_nm, dtype=float)
        values = np.asarray(self.intensity, dtype=float)
        if wl.ndim != 1 or wl.shape != values.shape:
            raise ScanValidationError(
                f"Scan {self.name!r}: wavelength and intensity columns must be 1D and of equal "
                f"length, got {wl.shape} and {values.shape}"
            )
        if not np.all(np.isfinite(wl)) or not np.all(np.isfinite(values)):
            raise ScanValidationError(f"Scan {self.name!r} contains NaN or infinite values")
        if wl.size > 1 and not np.all(np.diff(wl) > 0):
            raise ScanValidationError(f"Scan {self.name!r}: wavelengths must strictly increase")
        if np.any(values < 0):
            raise ScanValidationError(f"Scan {self.name!r} has negative intensities")
        object.__setattr__(self, "wavelength_nm", wl)
        object.__setattr__(self, "intensity", values)

    def __len__(self) -> int:
        return int(self.wavelength_nm.size)


def _refine_peak(wavelength: np.ndarray, intensity: np.ndarray, k: int) -> float:
    # vertex of a parabola through log-intensities (a Gaussian line), or through
    # the intensities themselves when a neighbour is zero
    a, b, c = intensity[k - 1], intensity[k], intensity[k + 1]
    if a > 0 and b > 0 and c > 0:
        a, b, c = math.log(a), math.log(b), math.log(c)
    curvature = a - 2.0 * b + c
    if curvature >= 0:
        return float(wavelength[k])
    offset = 0.5 * (a - c) / curvature
    half_span = 0.5 * (wavelength[k + 1] - wavelength[k - 1])
    return float(wavelength[k] + offset * half_span)


def detect_band_centers(
    scan: MeasuredScan, min_prominence: float = DEFAULT_MIN_PROMINENCE
) -> list[float]:
    """Band centers of a scan, increasing.

    Args:
        scan: Measured or synthetic scan.
        min_prominence: Prominence threshold as a fraction of the global maximum.

    Returns:
        Refined peak wavelengths in nm; empty when the scan has no bands.
    """
    if len(scan) < 3:
        raise ScanValidationError(f"Scan {scan.name!r} has {len(scan)} samples, need at least 3")
    top = float(scan.intensity.max())
    if top <= 0:
        return []
    peaks, _ = find_peaks(scan.intensity, prominence=min_prominence * top)
    centers = [_refine_peak(scan.wavelength_nm, scan.intensity, int(k)) for k in peaks]
    logger.debug(
        "Scan %r: %d band centers %s",
        scan.name,
        len(centers),
        ", ".join(f"{c:.3f}" for c in centers),
    )
    return centers


def synthesize_scan(
    provider: IndexProvider,
    bands: Mapping[Triplet, float],
    period_um: float,
    length_mm: float,
    wavelengths: WavelengthRange,
    filter_fwhm_nm: float = 0.0,
    noise: float = 0.0,
    seed: int = 0,
    name: str = "synthetic",
) -> MeasuredScan:
    """Degenerate scan predicted by an index model.

    Args:
        provider: Index backend holding the hidden corrections.
        bands: Relative weight of every excited triplet.
        period_um: Poling period.
        length_mm: Interaction length.
        wavelengths: Scan grid.
        filter_fwhm_nm: Gaussian filter bandwidth applied to the sum.
        noise: Uniform additive noise amplitude as a fraction of the peak.
        seed: Noise generator seed.
        name: Scan name.
    """
    grid = wavelengths.values()
    total = np.zeros(grid.shape)
    for triplet, weight in bands.items():
        section = degenerate_scan(provider, triplet, period_um, length_mm, wavelengths)
        total += weight * section.intensity
    total = smear_profile(grid, total, filter_fwhm_nm)
    if noise > 0:
        rng = np.random.default_rng(seed)
        total = total + noise * total.max() * rng.uniform(-1.0, 1.0, size=total.shape)
    total = np.clip(total, 0.0, None)
    return MeasuredScan(
        grid,
        total,
        name=name,
        description=", ".join(str(t) for t in bands),
        metadata={"filter_fwhm_nm": filter_fwhm_nm, "noise": noise, "seed": seed},
    )
