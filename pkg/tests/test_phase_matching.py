"""Tests for the quasi-phase-matching condition."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from modemix.dispersion import CorrectionsIndexProvider, GeometricCorrections
from modemix.errors import (
    ContractError,
    IndeterminateBandError,
    NoPhaseMatchError,
    OffBandError,
    QpmSignError,
    WavelengthRangeError,
)
from modemix.material import SellmeierModel
from modemix.models import ModeLabel, Polarization, Triplet
from modemix.phasematching import (
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
from modemix.phasematching.qpm import HALF_MAXIMUM_ARGUMENT
from tests.helpers import LinearIndexProvider, linear_degenerate_root_nm

PERIOD = 8.5
FUNDAMENTAL = Triplet.fundamental()


def _flat_provider() -> CorrectionsIndexProvider:
    """Dispersionless material without corrections: the bracket vanishes identically."""
    labels = [ModeLabel(0, 0, pol) for pol in Polarization]
    corrections = GeometricCorrections({label: 0.0 for label in labels}, (792.0, 815.0))
    return CorrectionsIndexProvider(SellmeierModel.constant(1.8), corrections)


def test_sum_frequency_wavelength() -> None:
    """Test energy conservation and its symmetry."""
    assert sum_frequency_wavelength(800.0, 800.0) == pytest.approx(400.0, rel=1e-15)
    assert sum_frequency_wavelength(790.0, 812.5) == sum_frequency_wavelength(812.5, 790.0)
    np.testing.assert_allclose(
        sum_frequency_wavelength(np.array([600.0, 1200.0]), 1200.0), [400.0, 600.0]
    )


def test_degenerate_root_closed_form() -> None:
    """Test root finding against the linear-index closed form."""
    provider = LinearIndexProvider()

    roots = degenerate_wavelength(provider, FUNDAMENTAL, PERIOD)

    assert len(roots) == 1
    expected = linear_degenerate_root_nm(provider, FUNDAMENTAL, PERIOD)
    assert roots[0] == pytest.approx(expected, abs=1e-8)
    assert roots[0] == pytest.approx(798.66, abs=0.01)
    assert abs(degenerate_mismatch(provider, FUNDAMENTAL, roots[0], PERIOD)) < 1e-10


def test_degenerate_root_is_refined() -> None:
    """Test the refined root sits inside a sub-picometre sign change."""
    provider = LinearIndexProvider()

    (root,) = degenerate_wavelength(provider, FUNDAMENTAL, PERIOD, (790.0, 810.0), samples=5)

    below = degenerate_mismatch(provider, FUNDAMENTAL, root - 1e-9, PERIOD)
    above = degenerate_mismatch(provider, FUNDAMENTAL, root + 1e-9, PERIOD)
    assert below * above < 0


def test_higher_order_root_shifts() -> None:
    """Test a stronger V mode moves the band to shorter wavelengths."""
    provider = LinearIndexProvider({"10V": 0.002})
    triplet = Triplet.parse("10V+00H>00S")

    root = degenerate_wavelength(provider, triplet, PERIOD)[0]

    assert root == pytest.approx(linear_degenerate_root_nm(provider, triplet, PERIOD), abs=1e-8)
    assert root == pytest.approx(775.8, abs=0.1)


def test_no_root_in_window() -> None:
    """Test a band outside the search window."""
    provider = LinearIndexProvider({"02S": -0.01})

    with pytest.raises(NoPhaseMatchError, match="No phase matching for 00V\\+00H>02S"):
        degenerate_wavelength(provider, Triplet.parse("00V+00H>02S"), PERIOD)


def test_wavenumber_bracket_is_period_free() -> None:
    """Test Δβ = 2π(bracket − 1/Λ)."""
    provider = LinearIndexProvider()
    bracket = wavenumber_bracket(provider, FUNDAMENTAL, 801.0, 797.0)

    mismatch = phase_mismatch(provider, FUNDAMENTAL, 801.0, 797.0, PERIOD)

    assert mismatch == pytest.approx(2 * math.pi * (bracket - 1 / PERIOD), abs=1e-12)


def test_out_of_range_wavelength() -> None:
    """Test the sum-frequency wavelength is range-checked."""
    with pytest.raises(WavelengthRangeError, match="S wavelength"):
        phase_mismatch(LinearIndexProvider(), FUNDAMENTAL, 500.0, 500.0, PERIOD)


def test_vanishing_mismatch_is_indeterminate() -> None:
    """Test an infinite period on a dispersionless material."""
    with pytest.raises(IndeterminateBandError, match="every wavelength"):
        degenerate_wavelength(_flat_provider(), FUNDAMENTAL, math.inf)


def test_period_needs_positive_bracket() -> None:
    """Test period fitting when the wave-number bracket is not positive."""
    with pytest.raises(QpmSignError, match="not positive"):
        fit_poling_period(_flat_provider(), FUNDAMENTAL, 800.0)


def test_period_fit_round_trip(model_provider: CorrectionsIndexProvider) -> None:
    """Test a fitted period puts the band back at its target."""
    for target in (792.0, 799.6, 807.3, 815.0):
        period = fit_poling_period(model_provider, FUNDAMENTAL, target)
        roots = degenerate_wavelength(model_provider, FUNDAMENTAL, period, (780.0, 830.0))
        assert min(abs(r - target) for r in roots) < 1e-6


def test_ktp_anchor_period(model_provider: CorrectionsIndexProvider) -> None:
    """Test the anchor period of the bundled model."""
    period = fit_poling_period(model_provider, FUNDAMENTAL, 799.6)

    assert 9.0 < period < 9.8


def test_ktp_band_width(model_provider: CorrectionsIndexProvider) -> None:
    """Test the degenerate band width of a 4.8 mm guide."""
    period = fit_poling_period(model_provider, FUNDAMENTAL, 799.6)

    width = band_fwhm(model_provider, FUNDAMENTAL, period, 4.8, 799.6)

    assert 0.19 < width < 0.24
    assert band_fwhm(model_provider, FUNDAMENTAL, period, 9.6, 799.6) == pytest.approx(
        width / 2, rel=1e-3
    )


def test_band_width_closed_form() -> None:
    """Test the FWHM against the linear-index closed form."""
    provider = LinearIndexProvider()
    numerator = 2 * 1.84 - 1.85 - 1.76
    k = 1 / PERIOD - (-0.06 + 0.05 + 0.04)
    h = HALF_MAXIMUM_ARGUMENT / (math.pi * 4800.0)
    expected_nm = 1000.0 * (numerator / (k - h) - numerator / (k + h))

    assert band_fwhm(provider, FUNDAMENTAL, PERIOD, 4.8) == pytest.approx(expected_nm, rel=1e-6)


def test_sinc_squared_values() -> None:
    """Test sinc² at zero, its half maximum and first zero."""
    assert sinc_squared(0.0) == 1.0
    assert sinc_squared(HALF_MAXIMUM_ARGUMENT) == pytest.approx(0.5, abs=1e-12)
    assert sinc_squared(math.pi) == pytest.approx(0.0, abs=1e-30)
    np.testing.assert_allclose(
        sinc_squared(np.array([0.0, -1.0, 1.0])), [1.0, 0.708073418273571, 0.708073418273571]
    )
    assert phase_matching_intensity(0.0, 4.8) == 1.0


@given(st.floats(min_value=-1e4, max_value=1e4, allow_nan=False))
def test_sinc_squared_bounds(x: float) -> None:
    """Test 0 <= sinc² <= 1 and evenness."""
    value = sinc_squared(x)

    assert 0.0 <= value <= 1.0
    assert value == pytest.approx(sinc_squared(-x), rel=1e-12, abs=1e-300)


def test_band_slope_reciprocity() -> None:
    """Test the slope against the linear-index closed form and its reciprocal."""
    provider = LinearIndexProvider()
    root = degenerate_wavelength(provider, FUNDAMENTAL, PERIOD)[0]

    slope_v = band_slope(provider, FUNDAMENTAL, PERIOD, (root, root), Polarization.V)
    slope_h = band_slope(provider, FUNDAMENTAL, PERIOD, (root, root), Polarization.H)

    # dλ_H/dλ_V = −(a_V − a_S)/(a_H − a_S) on the diagonal
    assert slope_v == pytest.approx(-(1.85 - 1.84) / (1.76 - 1.84), rel=1e-6)
    assert slope_v == pytest.approx(0.125, rel=1e-6)
    assert slope_v * slope_h == pytest.approx(1.0, rel=1e-7)


def test_band_slope_symmetric_pair() -> None:
    """Test a band whose V and H modes share a_V = a_H runs at slope −1."""
    provider = LinearIndexProvider({"00H": 0.09, "00S": 0.1})
    # 2 a_S − a_V − a_H = 0.18 and b_S − b_V − b_H = 0.03 place the root at 800 nm
    period = 1.0 / (0.18 / 0.8 + 0.03)
    root = degenerate_wavelength(provider, FUNDAMENTAL, period)[0]

    assert root == pytest.approx(800.0, abs=1e-8)
    assert band_slope(provider, FUNDAMENTAL, period, (root, root)) == pytest.approx(
        -1.0, rel=1e-7
    )


def test_band_slope_errors() -> None:
    """Test off-band points and an S step are rejected."""
    provider = LinearIndexProvider()
    root = degenerate_wavelength(provider, FUNDAMENTAL, PERIOD)[0]

    with pytest.raises(OffBandError, match="off the 00V\\+00H>00S band"):
        band_slope(provider, FUNDAMENTAL, PERIOD, (800.0, 780.0))
    with pytest.raises(ContractError, match="steps V or H"):
        band_slope(provider, FUNDAMENTAL, PERIOD, (root, root), Polarization.S)
