"""Quasi-phase-matching condition for a mode triplet.

Wavelengths are vacuum wavelengths in nm; wave numbers and the mismatch are
in rad/µm; the poling period is in µm. The mismatch of a triplet is

    Δβ = 2π (n_S/λ_S − n_V/λ_V − n_H/λ_H) − 2π/Λ,   1/λ_S = 1/λ_V + 1/λ_H

which vanishes on a phase-matching band (first-order QPM).
"""

import logging
import math
from typing import Union

import numpy as np
from scipy.optimize import brentq

from modemix.dispersion import IndexProvider
from modemix.errors import (
    ContractError,
    IndeterminateBandError,
    NoPhaseMatchError,
    OffBandError,
    QpmSignError,
    VerticalBandError,
    WavelengthRangeError,
)
from modemix.models import Polarization, Triplet

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

DEFAULT_SEARCH_WINDOW_NM = (760.0, 860.0)
DEFAULT_SEARCH_SAMPLES = 401
ROOT_TOLERANCE_NM = 1e-13
# smallest relative tolerance brentq accepts
ROOT_RTOL = 4 * np.finfo(float).eps
INDETERMINATE_MISMATCH = 1e-12
ON_BAND_TOLERANCE = 1e-6
SLOPE_STEP_NM = 0.01
# sinc²(x) = 1/2
HALF_MAXIMUM_ARGUMENT = 1.3915573782515103


def sum_frequency_wavelength(wavelength_v_nm: ArrayLike, wavelength_h_nm: ArrayLike) -> ArrayLike:
    """λ_S from energy conservation; symmetric in its arguments bit-for-bit."""
    return wavelength_v_nm * wavelength_h_nm / (wavelength_v_nm + wavelength_h_nm)


def _require_in_range(
    provider: IndexProvider, pol: Polarization, wavelength_nm: ArrayLike
) -> None:
    inside = np.ravel(np.asarray(provider.in_range(pol, wavelength_nm), dtype=bool))
    if not inside.all():
        first = float(np.ravel(np.asarray(wavelength_nm, dtype=float))[~inside][0])
        raise WavelengthRangeError(
            f"{pol.value} wavelength {first!r} nm is outside the validity window of the "
            "index backend"
        )


def wavenumber_bracket(
    provider: IndexProvider,
    triplet: Triplet,
    wavelength_v_nm: ArrayLike,
    wavelength_h_nm: ArrayLike,
) -> ArrayLike:
    """n_S/λ_S − (n_V/λ_V + n_H/λ_H) in µm⁻¹, without the 2π factor."""
    wavelength_s_nm = sum_frequency_wavelength(wavelength_v_nm, wavelength_h_nm)
    _require_in_range(provider, Polarization.V, wavelength_v_nm)
    _require_in_range(provider, Polarization.H, wavelength_h_nm)
    _require_in_range(provider, Polarization.S, wavelength_s_nm)
    k_v = provider.effective_index(triplet.v, wavelength_v_nm) / (wavelength_v_nm / 1000.0)
    k_h = provider.effective_index(triplet.h, wavelength_h_nm) / (wavelength_h_nm / 1000.0)
    k_s = provider.effective_index(triplet.s, wavelength_s_nm) / (wavelength_s_nm / 1000.0)
    return k_s - (k_v + k_h)


def phase_mismatch(
    provider: IndexProvider,
    triplet: Triplet,
    wavelength_v_nm: ArrayLike,
    wavelength_h_nm: ArrayLike,
    period_um: float,
) -> ArrayLike:
    """Δβ in rad/µm; ``period_um = inf`` drops the grating term.

    Raises:
        WavelengthRangeError: A V, H or sum-frequency wavelength is outside the
            backend's validity window.
    """
    bracket = wavenumber_bracket(provider, triplet, wavelength_v_nm, wavelength_h_nm)
    return 2.0 * math.pi * bracket - 2.0 * math.pi / period_um


def degenerate_mismatch(
    provider: IndexProvider, triplet: Triplet, wavelength_nm: ArrayLike, period_um: float
) -> ArrayLike:
    """Δβ(λ, λ) along the frequency-degenerate diagonal."""
    return phase_mismatch(provider, triplet, wavelength_nm, wavelength_nm, period_um)


def degenerate_wavelength(
    provider: IndexProvider,
    triplet: Triplet,
    period_um: float,
    window_nm: tuple[float, float] = DEFAULT_SEARCH_WINDOW_NM,
    samples: int = DEFAULT_SEARCH_SAMPLES,
) -> list[float]:
    """All degenerate phase-matching wavelengths of a triplet in a window.

    Δβ(λ, λ) is sampled on ``samples`` points; every sign change is refined
    with Brent's method.

    Returns:
        Roots in nm, increasing.

    Raises:
        IndeterminateBandError: Δβ vanishes on every sample.
        NoPhaseMatchError: No sign change in the window.
    """
    lo, hi = window_nm
    grid = np.linspace(lo, hi, samples)
    values = np.asarray(degenerate_mismatch(provider, triplet, grid, period_um))
    if np.all(np.abs(values) <= INDETERMINATE_MISMATCH):
        raise IndeterminateBandError(
            f"Phase mismatch of {triplet} vanishes across [{lo}, {hi}] nm; every wavelength "
            "is phase matched"
        )

    def mismatch(wavelength: float) -> float:
        return float(degenerate_mismatch(provider, triplet, wavelength, period_um))

    roots: list[float] = []
    for k in range(samples - 1):
        a, b = float(grid[k]), float(grid[k + 1])
        fa, fb = values[k], values[k + 1]
        if fa == 0.0:
            roots.append(a)
        elif fa * fb < 0.0:
            roots.append(brentq(mismatch, a, b, xtol=ROOT_TOLERANCE_NM, rtol=ROOT_RTOL))
    if values[-1] == 0.0:
        roots.append(float(grid[-1]))
    if not roots:
        raise NoPhaseMatchError(
            f"No phase matching for {triplet} in [{lo}, {hi}] nm with period {period_um} µm: "
            f"mismatch {values[0]:.6g} rad/µm at {lo} nm and {values[-1]:.6g} rad/µm at {hi} nm"
        )
    logger.debug("Degenerate roots of %s: %s", triplet, ", ".join(f"{r:.6f}" for r in roots))
    return roots


def fit_poling_period(
    provider: IndexProvider, triplet: Triplet, target_nm: float, min_bracket: float = 1e-12
) -> float:
    """Poling period placing the degenerate band of a triplet at ``target_nm``.

    Raises:
        QpmSignError: The wave-number bracket is not positive, so no positive
            first-order period exists.
    """
    bracket = float(wavenumber_bracket(provider, triplet, target_nm, target_nm))
    if not bracket > min_bracket:
        raise QpmSignError(
            f"Wave-number bracket {bracket:.6g} µm⁻¹ for {triplet} at {target_nm} nm is not "
            "positive; first-order QPM needs n_S/λ_S > n_V/λ_V + n_H/λ_H"
        )
    period = 1.0 / bracket
    logger.info("Poling period for %s at %.4f nm: %.6f µm", triplet, target_nm, period)
    return period


def sinc_squared_scalar(x: float) -> float:
    if x == 0.0:
        return 1.0
    s = math.sin(x) / x
    return s * s


_sinc_squared = np.vectorize(sinc_squared_scalar, otypes=[float])


def sinc_squared(x: ArrayLike) -> ArrayLike:
    """(sin x / x)² with the value 1 at 0."""
    if np.ndim(x) == 0:
        return sinc_squared_scalar(float(x))
    return _sinc_squared(x)


def phase_matching_intensity(mismatch: ArrayLike, length_mm: float) -> ArrayLike:
    """sinc²(Δβ L / 2) with L converted to µm."""
    return sinc_squared(np.multiply(mismatch, length_mm * 1000.0 / 2.0))


def band_slope(
    provider: IndexProvider,
    triplet: Triplet,
    period_um: float,
    point_nm: tuple[float, float],
    stepped: Polarization = Polarization.V,
    tolerance: float = ON_BAND_TOLERANCE,
    step_nm: float = SLOPE_STEP_NM,
) -> float:
    """Local slope of a phase-matching band.

    Args:
        provider: Index backend.
        triplet: Mode triplet.
        period_um: Poling period.
        point_nm: On-band point (λ_V, λ_H).
        stepped: ``V`` for dλ_H/dλ_V, ``H`` for dλ_V/dλ_H.
        tolerance: Largest |Δβ| (rad/µm) accepted as on-band.
        step_nm: Central-difference step.

    Returns:
        The implicit-function slope of the band through ``point_nm``.
    """
    lv, lh = point_nm
    here = float(phase_mismatch(provider, triplet, lv, lh, period_um))
    if abs(here) > tolerance:
        raise OffBandError(
            f"Point ({lv}, {lh}) nm is off the {triplet} band: |Δβ| = {abs(here):.3e} rad/µm "
            f"exceeds {tolerance:.1e}"
        )
    d_v = (
        float(phase_mismatch(provider, triplet, lv + step_nm, lh, period_um))
        - float(phase_mismatch(provider, triplet, lv - step_nm, lh, period_um))
    ) / (2.0 * step_nm)
    d_h = (
        float(phase_mismatch(provider, triplet, lv, lh + step_nm, period_um))
        - float(phase_mismatch(provider, triplet, lv, lh - step_nm, period_um))
    ) / (2.0 * step_nm)
    if stepped is Polarization.V:
        numerator, denominator, fixed = d_v, d_h, "H"
    elif stepped is Polarization.H:
        numerator, denominator, fixed = d_h, d_v, "V"
    else:
        raise ContractError(f"Band slope steps V or H, not {stepped.value}")
    if denominator == 0.0 or abs(denominator) <= 1e-12 * abs(numerator):
        raise VerticalBandError(
            f"Band of {triplet} does not vary with λ_{fixed} at ({lv}, {lh}) nm; "
            "the slope is unbounded"
        )
    return -numerator / denominator


def band_fwhm(
    provider: IndexProvider,
    triplet: Triplet,
    period_um: float,
    length_mm: float,
    center_nm: float | None = None,
    window_nm: tuple[float, float] = DEFAULT_SEARCH_WINDOW_NM,
    step_out_nm: float = 0.01,
    max_reach_nm: float = 50.0,
) -> float:
    """Full width at half maximum of the degenerate cross section of a band.

    Args:
        provider: Index backend.
        triplet: Mode triplet.
        period_um: Poling period.
        length_mm: Interaction length.
        center_nm: Band center; the first degenerate root in ``window_nm`` if omitted.
        window_nm: Root search window.
        step_out_nm: Outward step when bracketing each half-maximum crossing.
        max_reach_nm: Give up bracketing this far from the center.

    Returns:
        FWHM in nm along the λ_V = λ_H diagonal.
    """
    if center_nm is None:
        center_nm = degenerate_wavelength(provider, triplet, period_um, window_nm)[0]
    half_length_um = length_mm * 1000.0 / 2.0

    def excess(wavelength: float) -> float:
        mismatch = float(degenerate_mismatch(provider, triplet, wavelength, period_um))
        return abs(mismatch) * half_length_um - HALF_MAXIMUM_ARGUMENT

    edges = []
    for direction in (-1.0, 1.0):
        inner = center_nm
        outer = center_nm + direction * step_out_nm
        while excess(outer) < 0.0:
            inner = outer
            outer = outer + direction * step_out_nm
            if abs(outer - center_nm) > max_reach_nm:
                raise NoPhaseMatchError(
                    f"Band of {triplet} does not fall to half maximum within {max_reach_nm} nm "
                    f"of {center_nm:.4f} nm"
                )
        edges.append(brentq(excess, min(inner, outer), max(inner, outer), xtol=1e-12))
    return edges[1] - edges[0]
