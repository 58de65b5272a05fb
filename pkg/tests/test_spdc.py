"""Tests for the down-conversion design helpers."""

import math

import numpy as np
import pytest

from modemix.errors import (
    ConfigError,
    ContractError,
    NoPhaseMatchError,
    UnknownLabelError,
    ValidationError,
)
from modemix.dispersion import CorrectionsIndexProvider
from modemix.models import Polarization, Triplet
from modemix.overlap import relative_efficiency
from modemix.phasematching import WavelengthRange, degenerate_wavelength, fit_poling_period
from modemix.spdc import (
    PumpSpec,
    band_separation_report,
    jsi,
    pump_envelope,
    pump_mode_neighbors,
)
from tests.helpers import LinearIndexProvider, gaussian_modes

PERIOD = 8.5
FUNDAMENTAL = Triplet.fundamental()
MODES = gaussian_modes(("00V", 1.2), ("00H", 1.0), ("00S", 0.8), ("02S", 1.5))


def test_pump_spec() -> None:
    """Test pump defaults, parsing and validation."""
    assert PumpSpec.default() == PumpSpec(399.8, 1.0)
    assert PumpSpec.from_dict({"fwhm_nm": 0.5}) == PumpSpec(399.8, 0.5)
    assert PumpSpec.from_dict(PumpSpec(400.0, 2.0).to_dict()) == PumpSpec(400.0, 2.0)
    with pytest.raises(ConfigError, match="Unknown keys in \\[pump\\]: power"):
        PumpSpec.from_dict({"power": 1.0})
    with pytest.raises(ValidationError, match="Pump FWHM"):
        PumpSpec.from_dict({"fwhm_nm": 0.0})


def test_pump_envelope() -> None:
    """Test the envelope is 1 at the pump center and 1/2 at half its width."""
    pump = PumpSpec(400.0, 1.0)

    assert pump_envelope(pump, 800.0, 800.0) == pytest.approx(1.0)
    assert pump_envelope(pump, 801.0, 801.0) == pytest.approx(0.5, rel=1e-9)
    assert pump_envelope(pump, 799.0, 799.0) == pytest.approx(0.5, rel=1e-9)
    grid = pump_envelope(pump, np.array([[799.0], [800.0]]), np.array([[800.0, 801.0]]))
    assert grid.shape == (2, 2)


def test_jsi_peaks_on_pump_line() -> None:
    """Test the JSI is brightest where the band meets the pump."""
    provider = LinearIndexProvider()
    root = degenerate_wavelength(provider, FUNDAMENTAL, PERIOD)[0]
    pump = PumpSpec(root / 2, 1.0)
    grid = WavelengthRange(790.0, 808.0, 0.1)

    joint = jsi(provider, FUNDAMENTAL, PERIOD, 4.8, pump, grid, grid, MODES)

    lam_v, lam_h, top = joint.peak()
    assert top > 0.9
    assert lam_v * lam_h / (lam_v + lam_h) == pytest.approx(root / 2, abs=0.2)
    assert np.all(joint.intensity <= 1.0)


def test_jsi_efficiency() -> None:
    """Test the JSI scales with the overlap relative to the fundamental triplet."""
    provider = LinearIndexProvider()
    grid = WavelengthRange(795.0, 802.0, 0.5)
    pump = PumpSpec(399.3, 1.0)
    wider = Triplet.parse("00V+00H>02S")

    full = jsi(provider, FUNDAMENTAL, PERIOD, 4.8, pump, grid, grid, MODES)
    weaker = jsi(provider, wider, PERIOD, 4.8, pump, grid, grid, MODES)

    np.testing.assert_allclose(
        weaker.intensity, relative_efficiency(wider, MODES) * full.intensity, rtol=1e-12
    )
    assert 0.0 < relative_efficiency(wider, MODES) < 1.0


def test_jsi_parity_forbidden() -> None:
    """Test an odd-parity triplet has no joint spectrum even on its band."""
    provider = LinearIndexProvider()
    forbidden = Triplet.parse("00V+00H>10S")
    root = degenerate_wavelength(provider, forbidden, PERIOD)[0]
    grid = WavelengthRange(root - 2.0, root + 2.0, 0.1)

    joint = jsi(provider, forbidden, PERIOD, 4.8, PumpSpec(root / 2, 1.0), grid, grid, {})

    assert not joint.intensity.any()


def test_jsi_needs_fields() -> None:
    """Test an allowed triplet without solved fields."""
    grid = WavelengthRange(798.0, 800.0, 0.5)

    with pytest.raises(UnknownLabelError, match="No solved field"):
        jsi(LinearIndexProvider(), FUNDAMENTAL, PERIOD, 4.8, PumpSpec(), grid, grid, {})


def test_separation_report() -> None:
    """Test isolated and coinciding bands sharing one pump mode."""
    provider = LinearIndexProvider({"01V": 0.001, "01H": 0.001})
    vertical = Triplet.parse("01V+00H>00S")
    horizontal = Triplet.parse("00V+01H>00S")

    report = band_separation_report(provider, [FUNDAMENTAL, vertical, horizontal], PERIOD, 4.8)

    assert not report.all_isolated
    assert report.entry(FUNDAMENTAL).isolated
    assert report.entry(FUNDAMENTAL).nearest_separation_nm == pytest.approx(11.41, abs=0.02)
    assert not report.entry(vertical).isolated
    assert report.entry(vertical).nearest == horizontal
    assert report.entry(vertical).nearest_separation_nm == pytest.approx(0.0, abs=1e-9)
    assert len(report.separations) == 3
    assert report.entry(FUNDAMENTAL).fwhm_nm > 0
    with pytest.raises(KeyError):
        report.entry(Triplet.parse("00V+00H>01S"))


def test_separation_report_isolated() -> None:
    """Test two well separated bands."""
    provider = LinearIndexProvider({"01V": 0.001})

    report = band_separation_report(
        provider, [FUNDAMENTAL, Triplet.parse("01V+00H>00S")], PERIOD, 4.8
    )

    assert report.all_isolated
    (separation,) = report.separations
    assert separation.resolved
    assert separation.required_nm == pytest.approx(
        (report.bands[0].fwhm_nm + report.bands[1].fwhm_nm) / 2 + 0.5
    )


def test_separation_report_unmatched_band() -> None:
    """Test a triplet without a root in the window is reported, not fatal."""
    provider = LinearIndexProvider({"01V": 0.001, "02V": 0.01})
    vertical = Triplet.parse("01V+00H>00S")
    rootless = Triplet.parse("02V+00H>00S")

    report = band_separation_report(provider, [FUNDAMENTAL, rootless, vertical], PERIOD, 4.8)

    entry = report.entry(rootless)
    assert not entry.phase_matched
    assert math.isnan(entry.center_nm)
    assert math.isnan(entry.fwhm_nm)
    assert not entry.isolated
    assert entry.nearest is None
    assert report.unmatched == (rootless,)
    assert report.all_isolated
    (separation,) = report.separations
    assert {separation.first, separation.second} == {FUNDAMENTAL, vertical}
    assert report.entry(vertical).nearest == FUNDAMENTAL
    with pytest.raises(NoPhaseMatchError, match="No band of 1 triplet"):
        band_separation_report(provider, [rootless], PERIOD, 4.8)


def test_separation_report_contract() -> None:
    """Test an empty list and mixed pump modes are rejected."""
    provider = LinearIndexProvider()

    with pytest.raises(ContractError, match="at least one triplet"):
        band_separation_report(provider, [], PERIOD, 4.8)
    with pytest.raises(ContractError, match="one pump mode"):
        band_separation_report(
            provider, [FUNDAMENTAL, Triplet.parse("00V+00H>01S")], PERIOD, 4.8
        )


def test_single_band_report() -> None:
    """Test a lone band is isolated and has no neighbour."""
    report = band_separation_report(LinearIndexProvider(), [FUNDAMENTAL], PERIOD, 4.8)

    entry = report.entry(FUNDAMENTAL)
    assert entry.isolated
    assert entry.nearest is None
    assert math.isinf(entry.nearest_separation_nm)


def test_pump_mode_neighbors() -> None:
    """Test bands of other pump modes near the reference band."""
    provider = LinearIndexProvider({"01S": -0.0002, "02S": -0.01})
    pump_modes = [
        FUNDAMENTAL,
        Triplet.parse("00V+00H>01S"),
        Triplet.parse("00V+00H>02S"),
        Triplet.parse("01V+00H>01S"),
    ]

    neighbors = pump_mode_neighbors(provider, FUNDAMENTAL, pump_modes, PERIOD)

    assert [n.triplet for n in neighbors] == [Triplet.parse("00V+00H>01S")]
    assert neighbors[0].offset_nm == pytest.approx(-4.564, abs=0.01)
    assert pump_mode_neighbors(provider, FUNDAMENTAL, pump_modes, PERIOD, within_nm=3.0) == []


def test_calibrated_fundamental_band_stands_apart(
    model_provider: CorrectionsIndexProvider,
) -> None:
    """Test the calibrated 00V+00H>00S band lies over 3 nm from every other 00S-pumped band."""
    corrections = model_provider.corrections
    triplets = [
        Triplet.parse(f"{v}+{h}>00S")
        for v in corrections.labels(Polarization.V)
        for h in corrections.labels(Polarization.H)
    ]
    allowed = [t for t in triplets if t.parity_allowed()]
    period = fit_poling_period(model_provider, FUNDAMENTAL, 799.6)

    report = band_separation_report(model_provider, allowed, period, 4.8)

    entry = report.entry(FUNDAMENTAL)
    assert entry.center_nm == pytest.approx(799.6, abs=1e-6)
    assert entry.nearest is not None
    assert entry.nearest_separation_nm > 3.0
    assert entry.isolated
