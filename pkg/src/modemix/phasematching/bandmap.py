"""Phase-matching band maps over (λ_V, λ_H) and their degenerate cross sections."""

import logging
import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy.ndimage import gaussian_filter, gaussian_filter1d

from modemix.dispersion import IndexProvider
from modemix.errors import ValidationError
from modemix.models import Polarization, Triplet
from modemix.phasematching.qpm import (
    phase_matching_intensity,
    phase_mismatch,
    sum_frequency_wavelength,
)

logger = logging.getLogger(__name__)

DEFAULT_STEP_NM = 0.2
FWHM_TO_SIGMA = 1.0 / (2.0 * math.sqrt(2.0 * math.log(2.0)))

_RANGE_PATTERN = re.compile(r"^\s*([^:]+):([^:]+)(?::([^:]+))?\s*$")


@dataclass(frozen=True)
class WavelengthRange:
    """Inclusive wavelength grid start:stop:step in nm."""

    start_nm: float
    stop_nm: float
    step_nm: float = DEFAULT_STEP_NM

    def __post_init__(self) -> None:
        if not (math.isfinite(self.start_nm) and math.isfinite(self.stop_nm)):
            raise ValidationError(f"Range bounds must be finite: {self.start_nm}:{self.stop_nm}")
        if not self.step_nm > 0:
            raise ValidationError(f"Range step must be positive, got {self.step_nm}")
        if self.stop_nm < self.start_nm:
            raise ValidationError(
                f"Range stop {self.stop_nm} nm is below its start {self.start_nm} nm"
            )

    @classmethod
    def parse(cls, text: str) -> "WavelengthRange":
        """Parse ``"a:b"`` or ``"a:b:s"`` (nm)."""
        match = _RANGE_PATTERN.match(text)
        if match is None:
            raise ValidationError(f"Wavelength range {text!r} is not of the form a:b[:step]")
        try:
            start, stop = float(match.group(1)), float(match.group(2))
            step = float(match.group(3)) if match.group(3) else DEFAULT_STEP_NM
        except ValueError:
            raise ValidationError(f"Wavelength range {text!r} has a non-numeric field") from None
        return cls(start, stop, step)

    @property
    def count(self) -> int:
        return int(math.floor((self.stop_nm - self.start_nm) / self.step_nm + 1e-9)) + 1

    def values(self) -> np.ndarray:
        """Grid points start + k * step; the stop is included when it lies on the grid."""
        return self.start_nm + np.arange(self.count) * self.step_nm

    def __str__(self) -> str:
        return f"{self.start_nm!r}:{self.stop_nm!r}:{self.step_nm!r}"


def _check_grid(values: np.ndarray, name: str) -> None:
    if values.ndim != 1 or values.size == 0:
        raise ValidationError(f"{name} grid must be a nonempty 1D array")
    if values.size > 1 and not np.all(np.diff(values) > 0):
        raise ValidationError(f"{name} grid must be strictly increasing")


@dataclass(frozen=True, eq=False)
class BandMap:
    """Relative sum-frequency intensity on a (λ_V, λ_H) grid.

    ``intensity[i, j]`` belongs to ``lambda_v_nm[i]`` and ``lambda_h_nm[j]``.
    Cells whose wavelengths fall outside the backend's validity are masked
    (``valid`` is False) and hold intensity 0.
    """

    lambda_v_nm: np.ndarray
    lambda_h_nm: np.ndarray
    intensity: np.ndarray
    valid: np.ndarray
    triplet: Triplet
    period_um: float
    length_mm: float
    filter_fwhm_nm: float = 0.0

    def __post_init__(self) -> None:
        _check_grid(self.lambda_v_nm, "λ_V")
        _check_grid(self.lambda_h_nm, "λ_H")
        shape = (self.lambda_v_nm.size, self.lambda_h_nm.size)
        if self.intensity.shape != shape or self.valid.shape != shape:
            raise ValidationError(
                f"Band map arrays must have shape {shape}, got {self.intensity.shape}"
            )
        if np.any(self.intensity < 0) or not np.all(np.isfinite(self.intensity)):
            raise ValidationError("Band map intensities must be finite and non-negative")

    @property
    def masked_count(self) -> int:
        return int(np.count_nonzero(~self.valid))

    def peak(self) -> tuple[float, float, float]:
        """(λ_V, λ_H, intensity) of the brightest cell."""
        i, j = np.unravel_index(np.argmax(self.intensity), self.intensity.shape)
        return float(self.lambda_v_nm[i]), float(self.lambda_h_nm[j]), float(self.intensity[i, j])

    def normalized(self) -> "BandMap":
        top = self.intensity.max()
        if top == 0:
            return self
        return replace(self, intensity=self.intensity / top)

    def scaled(self, factor: float) -> "BandMap":
        if not factor >= 0:
            raise ValidationError(f"Scale factor must be >= 0, got {factor}")
        return replace(self, intensity=self.intensity * factor)

    def diagonal(self) -> "CrossSection":
        """Cells with λ_V == λ_H, when both grids coincide."""
        if not np.array_equal(self.lambda_v_nm, self.lambda_h_nm):
            raise ValidationError("Diagonal needs identical λ_V and λ_H grids")
        return CrossSection(
            wavelength_nm=self.lambda_v_nm.copy(),
            intensity=np.diagonal(self.intensity).copy(),
            valid=np.diagonal(self.valid).copy(),
            triplet=self.triplet,
            period_um=self.period_um,
            length_mm=self.length_mm,
        )


@dataclass(frozen=True, eq=False)
class CrossSection:
    """Intensity along the frequency-degenerate diagonal λ_V = λ_H."""

    wavelength_nm: np.ndarray
    intensity: np.ndarray
    valid: np.ndarray
    triplet: Triplet
    period_um: float
    length_mm: float

    def __post_init__(self) -> None:
        _check_grid(self.wavelength_nm, "λ")
        if self.intensity.shape != self.wavelength_nm.shape:
            raise ValidationError("Cross-section intensity and wavelength lengths differ")


def _valid_cells(
    provider: IndexProvider, lambda_v: float, lambda_h: np.ndarray
) -> np.ndarray:
    lambda_s = sum_frequency_wavelength(lambda_v, lambda_h)
    ok_v = bool(np.all(provider.in_range(Polarization.V, lambda_v)))
    return (
        ok_v
        & np.asarray(provider.in_range(Polarization.H, lambda_h), dtype=bool)
        & np.asarray(provider.in_range(Polarization.S, lambda_s), dtype=bool)
    )


def _map_row(
    provider: IndexProvider,
    triplet: Triplet,
    period_um: float,
    length_mm: float,
    lambda_v: float,
    lambda_h: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    valid = _valid_cells(provider, lambda_v, lambda_h)
    row = np.zeros(lambda_h.shape)
    if valid.any():
        mismatch = phase_mismatch(provider, triplet, lambda_v, lambda_h[valid], period_um)
        row[valid] = phase_matching_intensity(mismatch, length_mm)
    return row, valid


def band_map(
    provider: IndexProvider,
    triplet: Triplet,
    period_um: float,
    length_mm: float,
    range_v: WavelengthRange,
    range_h: WavelengthRange,
    workers: int = 1,
) -> BandMap:
    """sinc²(Δβ L / 2) on a (λ_V, λ_H) grid.

    Args:
        provider: Index backend, shared read-only across worker threads.
        triplet: Mode triplet.
        period_um: Poling period.
        length_mm: Interaction length.
        range_v: λ_V grid.
        range_h: λ_H grid.
        workers: Threads evaluating map rows.

    Returns:
        The band map; out-of-range cells are masked instead of aborting.
    """
    lambda_v = range_v.values()
    lambda_h = range_h.values()
    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(
            pool.map(
                lambda lv: _map_row(provider, triplet, period_um, length_mm, float(lv), lambda_h),
                lambda_v,
            )
        )
    intensity = np.vstack([row for row, _ in rows])
    valid = np.vstack([mask for _, mask in rows])
    result = BandMap(lambda_v, lambda_h, intensity, valid, triplet, period_um, length_mm)
    if result.masked_count:
        logger.warning(
            "%d of %d band-map cells for %s are outside the validity window and masked",
            result.masked_count,
            valid.size,
            triplet,
        )
    logger.info("Band map for %s: %d x %d cells", triplet, lambda_v.size, lambda_h.size)
    return result


def degenerate_scan(
    provider: IndexProvider,
    triplet: Triplet,
    period_um: float,
    length_mm: float,
    wavelengths: WavelengthRange,
) -> CrossSection:
    """Intensity along λ_V = λ_H, identical to the diagonal of a matching band map."""
    grid = wavelengths.values()
    lambda_s = sum_frequency_wavelength(grid, grid)
    valid = (
        np.asarray(provider.in_range(Polarization.V, grid), dtype=bool)
        & np.asarray(provider.in_range(Polarization.H, grid), dtype=bool)
        & np.asarray(provider.in_range(Polarization.S, lambda_s), dtype=bool)
    )
    intensity = np.zeros(grid.shape)
    if valid.any():
        mismatch = phase_mismatch(provider, triplet, grid[valid], grid[valid], period_um)
        intensity[valid] = phase_matching_intensity(mismatch, length_mm)
    return CrossSection(grid, intensity, valid, triplet, period_um, length_mm)


def _grid_step(values: np.ndarray) -> float:
    if values.size < 2:
        return 1.0
    steps = np.diff(values)
    if not np.allclose(steps, steps[0], rtol=1e-6, atol=0.0):
        raise ValidationError("Smearing needs a uniform wavelength grid")
    return float(steps[0])


def smear_band_map(band: BandMap, fwhm_nm: float) -> BandMap:
    """Convolve a map with a Gaussian filter response of the given FWHM on both axes."""
    if fwhm_nm < 0:
        raise ValidationError(f"Filter FWHM must be >= 0, got {fwhm_nm}")
    if fwhm_nm == 0:
        return band
    sigma_nm = fwhm_nm * FWHM_TO_SIGMA
    sigma = (
        sigma_nm / _grid_step(band.lambda_v_nm),
        sigma_nm / _grid_step(band.lambda_h_nm),
    )
    smeared = gaussian_filter(np.where(band.valid, band.intensity, 0.0), sigma, mode="nearest")
    smeared = np.where(band.valid, np.clip(smeared, 0.0, None), 0.0)
    return replace(band, intensity=smeared, filter_fwhm_nm=fwhm_nm)


def smear_profile(wavelength_nm: np.ndarray, intensity: np.ndarray, fwhm_nm: float) -> np.ndarray:
    """1D counterpart of :func:`smear_band_map` for scans and cross sections."""
    if fwhm_nm < 0:
        raise ValidationError(f"Filter FWHM must be >= 0, got {fwhm_nm}")
    if fwhm_nm == 0:
        return np.asarray(intensity, dtype=float).copy()
    sigma = fwhm_nm * FWHM_TO_SIGMA / _grid_step(np.asarray(wavelength_nm, dtype=float))
    smeared = gaussian_filter1d(np.asarray(intensity, dtype=float), sigma, mode="nearest")
    return np.clip(smeared, 0, None)
