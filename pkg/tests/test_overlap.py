"""Tests for triplet overlap integrals and the efficiency table."""

import math
from dataclasses import replace

import numpy as np
import pytest

from modemix.errors import ContractError, GridMismatchError, UnknownLabelError
from modemix.material import load_material
from modemix.models import ModeLabel, Triplet, WaveguideSpec
from modemix.modes import ModeField
from modemix.overlap import (
    efficiency_table,
    overlap_integral,
    relative_efficiency,
    solve_triplet_modes,
)
from modemix.waveguide import GridGeometry
from tests.helpers import LinearIndexProvider, gaussian_mode

_gaussian = gaussian_mode


def _analytic_overlap(*widths: float) -> float:
    amplitude = math.prod(math.sqrt(2 / (math.pi * w**2)) for w in widths)
    return amplitude * math.pi / sum(1 / w**2 for w in widths)


def test_gaussian_overlap_closed_form() -> None:
    """Test the overlap of three Gaussians against the analytic value."""
    v, h, s = _gaussian("00V", 1.2), _gaussian("00H", 1.0), _gaussian("00S", 0.8)

    result = overlap_integral(v, h, s)

    assert result.signed == pytest.approx(_analytic_overlap(1.2, 1.0, 0.8), rel=1e-8)
    assert result.magnitude == result.signed


def test_parity_forbidden_overlap_vanishes() -> None:
    """Test an odd V field gives no overlap with even fields."""
    result = overlap_integral(
        _gaussian("10V", 1.2, odd_x=True), _gaussian("00H", 1.0), _gaussian("00S", 0.8)
    )

    assert abs(result.signed) < 1e-12


def test_overlap_sign() -> None:
    """Test a flipped field flips the signed overlap only."""
    v, h, s = _gaussian("00V", 1.2), _gaussian("00H", 1.0), _gaussian("00S", 0.8)
    flipped = replace(h, dominant=-h.dominant)

    plain = overlap_integral(v, h, s)
    negative = overlap_integral(v, flipped, s)

    assert negative.signed == -plain.signed
    assert negative.magnitude == plain.magnitude


def test_overlap_requires_common_grid() -> None:
    """Test modes on different grids are rejected."""
    other = GridGeometry(x_offset=-20, y_offset=-20, hx_um=0.2, hy_um=0.2, nx=41, ny=41)
    coarse = replace(
        _gaussian("00S", 0.8), geometry=other, dominant=np.ones((41, 41)), minor=np.zeros((41, 41))
    )

    with pytest.raises(GridMismatchError, match="resample"):
        overlap_integral(_gaussian("00V", 1.2), _gaussian("00H", 1.0), coarse)


def test_overlap_requires_normalized_modes() -> None:
    """Test unnormalized fields are rejected."""
    v = _gaussian("00V", 1.2)
    doubled = replace(v, dominant=2 * v.dominant)

    with pytest.raises(ContractError, match="not power-normalized"):
        overlap_integral(doubled, _gaussian("00H", 1.0), _gaussian("00S", 0.8))


def _modes() -> dict[ModeLabel, ModeField]:
    fields = [
        _gaussian("00V", 1.2),
        _gaussian("10V", 1.2, odd_x=True),
        _gaussian("00H", 1.0),
        _gaussian("00S", 0.8),
        _gaussian("02S", 1.5),
    ]
    return {mode.label: mode for mode in fields}


def test_efficiency_table() -> None:
    """Test relative efficiencies, row order and measured values."""
    provider = LinearIndexProvider({"10V": 0.002, "02S": -0.01})
    fundamental = Triplet.fundamental()
    forbidden = Triplet.parse("10V+00H>00S")
    unmatched = Triplet.parse("00V+00H>02S")

    rows = efficiency_table(
        [fundamental, unmatched, forbidden],
        _modes(),
        provider,
        8.5,
        measured={fundamental: 95.0},
    )

    assert [row.triplet for row in rows] == [forbidden, fundamental, unmatched]
    assert rows[1].efficiency == 100.0
    assert rows[1].measured == 95.0
    assert rows[0].efficiency < 1e-20
    assert rows[0].degenerate_wavelength_nm == pytest.approx(775.8, abs=0.1)
    assert math.isnan(rows[2].degenerate_wavelength_nm)
    assert not rows[2].phase_matched
    assert rows[2].measured is None
    expected = 100 * (_analytic_overlap(1.2, 1.0, 1.5) / _analytic_overlap(1.2, 1.0, 0.8)) ** 2
    assert rows[2].efficiency == pytest.approx(expected, rel=1e-6)


def test_relative_efficiency() -> None:
    """Test efficiencies relative to the fundamental triplet and the parity rule."""
    modes = _modes()

    assert relative_efficiency(Triplet.fundamental(), modes) == 1.0
    assert relative_efficiency(Triplet.parse("10V+00H>00S"), modes) == 0.0
    assert relative_efficiency(Triplet.parse("00V+00H>02S"), modes) == pytest.approx(
        (_analytic_overlap(1.2, 1.0, 1.5) / _analytic_overlap(1.2, 1.0, 0.8)) ** 2, rel=1e-6
    )
    assert relative_efficiency(Triplet.parse("00V+00H>10S"), {}) == 0.0
    with pytest.raises(UnknownLabelError, match="01H"):
        relative_efficiency(Triplet.parse("00V+01H>00S"), modes)


def test_efficiency_table_needs_reference() -> None:
    """Test the reference triplet must be tabulated."""
    with pytest.raises(ContractError, match="reference triplet"):
        efficiency_table([Triplet.parse("10V+00H>00S")], _modes(), LinearIndexProvider(), 8.5)


def test_efficiency_table_missing_field() -> None:
    """Test a triplet without a solved field."""
    with pytest.raises(UnknownLabelError, match="01H"):
        efficiency_table(
            [Triplet.fundamental(), Triplet.parse("00V+01H>00S")],
            _modes(),
            LinearIndexProvider(),
            8.5,
        )


def test_solved_fundamental_triplet(small_spec: WaveguideSpec) -> None:
    """Test solved fields of the fundamental triplet overlap strongly."""
    ktp = load_material("ktp")
    modes = solve_triplet_modes(small_spec, ktp, [Triplet.fundamental()], 800.0)

    assert set(modes) == set(Triplet.fundamental().labels)
    assert modes[ModeLabel.parse("00S")].wavelength_nm == 400.0
    result = overlap_integral(*(modes[label] for label in Triplet.fundamental().labels))
    assert result.magnitude > 0.05


def test_unguided_triplet_mode(small_spec: WaveguideSpec) -> None:
    """Test a mode the guide does not support."""
    ktp = load_material("ktp")

    with pytest.raises(UnknownLabelError, match="not guided"):
        solve_triplet_modes(small_spec, ktp, [Triplet.parse("99V+00H>00S")], 800.0)
