"""Tests for file readers and writers."""

import json
import math
from pathlib import Path

import numpy as np
import pytest

from modemix.dispersion import GeometricCorrections
from modemix.errors import ConfigError, LabelParseError, ScanValidationError
from modemix.identification import MeasuredScan
from modemix.material import SellmeierModel
from modemix.models import ModeLabel, Orientation, Triplet, WaveguideSpec
from modemix.modes import ModeField, normalize_fields
from modemix.overlap import EfficiencyRow
from modemix.phasematching import WavelengthRange, band_map
from modemix.spdc import band_separation_report
from modemix.storage import (
    SCHEMA_VERSION,
    read_candidates,
    read_corrections,
    read_csv,
    read_json,
    read_measured_efficiencies,
    read_profile_csv,
    read_scan,
    read_scans,
    sidecar_path,
    write_band_map,
    write_corrections,
    write_csv,
    write_efficiency_table,
    write_mode_image,
    write_modes,
    write_profile,
    write_scan,
    write_separation_report,
)
from modemix.waveguide import GridGeometry, index_profile
from tests.helpers import LinearIndexProvider

FUNDAMENTAL = Triplet.fundamental()


def test_csv_round_trip(tmp_path: Path) -> None:
    """Test floats reload bit-identically and other cells are encoded."""
    path = tmp_path / "table.csv"
    values = [0.1 + 0.2, 1 / 3, 799.6000000000001]

    write_csv(path, ("value", "flag", "note"), [(v, True, None) for v in values])
    rows = read_csv(path, ("value",))

    assert [float(r["value"]) for r in rows] == values
    assert {r["flag"] for r in rows} == {"1"}
    assert {r["note"] for r in rows} == {""}


def test_csv_missing_column(tmp_path: Path) -> None:
    """Test required columns and missing files."""
    path = write_csv(tmp_path / "table.csv", ("lambda_nm",), [(800.0,)])

    with pytest.raises(ConfigError, match="missing column\\(s\\) intensity"):
        read_csv(path, ("lambda_nm", "intensity"))
    with pytest.raises(ConfigError, match="File not found"):
        read_csv(tmp_path / "absent.csv", ("lambda_nm",))


def test_band_map_files(tmp_path: Path) -> None:
    """Test the band map table order and its sidecar."""
    grid = WavelengthRange(799.0, 801.0, 1.0)
    band = band_map(LinearIndexProvider(), FUNDAMENTAL, 8.5, 4.8, grid, grid)
    path = tmp_path / "map.csv"

    write_band_map(path, band)

    rows = read_csv(path, ("lambda_V_nm", "lambda_H_nm", "intensity", "valid"))
    assert len(rows) == 9
    assert [(r["lambda_V_nm"], r["lambda_H_nm"]) for r in rows[:3]] == [
        ("799.0", "799.0"),
        ("799.0", "800.0"),
        ("799.0", "801.0"),
    ]
    assert float(rows[4]["intensity"]) == band.intensity[1, 1]
    sidecar = read_json(sidecar_path(path), "band_map")
    assert sidecar["schema_version"] == SCHEMA_VERSION
    assert sidecar["triplet"] == "00V+00H>00S"
    assert sidecar["shape"] == [3, 3]
    assert "generated_at" in sidecar
    with pytest.raises(ConfigError, match="expected a 'modes' document"):
        read_json(sidecar_path(path), "modes")


def test_read_json_errors(tmp_path: Path) -> None:
    """Test missing, malformed and future documents."""
    bad = tmp_path / "bad.json"
    bad.write_text("{", encoding="utf-8")
    future = tmp_path / "future.json"
    future.write_text(json.dumps({"schema_version": 2, "kind": "modes"}), encoding="utf-8")

    with pytest.raises(ConfigError, match="File not found"):
        read_json(tmp_path / "absent.json")
    with pytest.raises(ConfigError, match="Invalid JSON"):
        read_json(bad)
    with pytest.raises(ConfigError, match="unsupported schema version 2"):
        read_json(future)


def test_scan_round_trip(tmp_path: Path) -> None:
    """Test scans reload exactly and are named by their file."""
    scan = MeasuredScan(np.array([799.0, 799.5, 800.0]), np.array([0.1, 0.7, 0.2]))
    write_scan(tmp_path / "b_pump.csv", scan)
    write_scan(tmp_path / "a_vertical.csv", scan)

    loaded = read_scans(tmp_path)

    assert [s.name for s in loaded] == ["a_vertical", "b_pump"]
    np.testing.assert_array_equal(loaded[0].wavelength_nm, scan.wavelength_nm)
    np.testing.assert_array_equal(loaded[0].intensity, scan.intensity)


def test_scan_errors(tmp_path: Path) -> None:
    """Test scan directories and values are checked."""
    empty = tmp_path / "empty"
    empty.mkdir()
    broken = tmp_path / "broken.csv"
    broken.write_text("lambda_nm,intensity\n800.0,high\n", encoding="utf-8")

    with pytest.raises(ScanValidationError, match="No scan files"):
        read_scans(empty)
    with pytest.raises(ScanValidationError, match="does not exist"):
        read_scans(tmp_path / "absent")
    with pytest.raises(ScanValidationError, match="non-numeric"):
        read_scan(broken)


def test_read_candidates(tmp_path: Path) -> None:
    """Test comments, blank lines and duplicates in a candidate list."""
    path = tmp_path / "candidates.txt"
    path.write_text(
        "# degenerate bands\n00V+00H>00S\n\n01V+00H>00S  # first V order\n00V+00H>00S\n",
        encoding="utf-8",
    )

    assert read_candidates(path) == [FUNDAMENTAL, Triplet.parse("01V+00H>00S")]


def test_read_candidates_errors(tmp_path: Path) -> None:
    """Test a malformed line is reported with its number."""
    path = tmp_path / "candidates.txt"
    path.write_text("00V+00H>00S\n\n00V+00S>00H\n", encoding="utf-8")

    with pytest.raises(LabelParseError, match="candidates.txt:3:"):
        read_candidates(path)
    with pytest.raises(ConfigError, match="File not found"):
        read_candidates(tmp_path / "absent.txt")


def test_corrections_file_round_trip(tmp_path: Path) -> None:
    """Test corrections survive a write and a read."""
    corrections = GeometricCorrections(
        {ModeLabel.parse("00V"): 0.0068, ModeLabel.parse("00S"): 0.0049}, (792.0, 815.0)
    )

    loaded = read_corrections(write_corrections(tmp_path / "corrections.json", corrections))

    assert dict(loaded.values) == dict(corrections.values)
    assert loaded.window_nm == (792.0, 815.0)


def _mode() -> ModeField:
    geometry = GridGeometry(x_offset=-20, y_offset=-10, hx_um=0.2, hy_um=0.2, nx=41, ny=31)
    x = geometry.x[:, None]
    y = geometry.y[None, :]
    u = x * np.exp(-(x**2 + (y - 1.0) ** 2))
    dominant, minor = normalize_fields(u, np.zeros_like(u), geometry)
    return ModeField(
        label=ModeLabel.parse("10V"),
        wavelength_nm=800.0,
        n_eff=1.85,
        geometry=geometry,
        dominant=dominant,
        minor=minor,
        orientation=Orientation.VERTICAL,
    )


def test_mode_image(tmp_path: Path) -> None:
    """Test the plain PGM header and pixel range."""
    lines = write_mode_image(tmp_path / "10V.pgm", _mode()).read_text(encoding="ascii").splitlines()

    assert lines[0] == "P2"
    assert lines[1].startswith("# 10V n_eff=")
    assert lines[2] == "41 31"
    assert lines[3] == "255"
    pixels = np.array([[int(v) for v in line.split()] for line in lines[4:]])
    assert pixels.shape == (31, 41)
    assert pixels.max() == 255
    assert pixels.min() == 0


def test_modes_document(tmp_path: Path) -> None:
    """Test the field document layout."""
    mode = _mode()

    document = read_json(write_modes(tmp_path / "modes.json", [mode]), "modes")

    (entry,) = document["modes"]
    assert entry["label"] == "10V"
    assert entry["orientation"] == Orientation.VERTICAL.value
    assert entry["geometry"]["nx"] == 41
    assert np.array_equal(np.array(entry["dominant"]), mode.dominant)


def test_profile_round_trip(tmp_path: Path, small_spec: WaveguideSpec) -> None:
    """Test a written index profile reloads onto the same grid."""
    grid = index_profile(small_spec, SellmeierModel.constant(1.8), "z", 800.0)
    path = tmp_path / "profile.csv"

    write_profile(path, grid)
    x, y, values = read_profile_csv(path)

    np.testing.assert_array_equal(x, grid.geometry.x)
    np.testing.assert_array_equal(y, grid.geometry.y)
    np.testing.assert_array_equal(values, grid.values)
    assert read_json(sidecar_path(path), "index_profile")["axis"] == "z"


def test_efficiency_table_file(tmp_path: Path) -> None:
    """Test efficiency rows with missing roots and measurements."""
    rows = [
        EfficiencyRow(FUNDAMENTAL, 799.6, 0.31, 100.0, 100.0),
        EfficiencyRow(Triplet.parse("00V+00H>02S"), math.nan, -0.02, 0.42),
    ]

    loaded = read_csv(write_efficiency_table(tmp_path / "eff.csv", rows), ("triplet",))

    assert [r["triplet"] for r in loaded] == ["00V+00H>00S", "00V+00H>02S"]
    assert loaded[1]["degenerate_wavelength_nm"] == "nan"
    assert loaded[1]["measured_eff"] == ""
    assert float(loaded[0]["calculated_eff"]) == 100.0


def test_measured_efficiencies(tmp_path: Path) -> None:
    """Test measured efficiencies and a malformed row."""
    good = tmp_path / "measured.csv"
    good.write_text("triplet,measured_eff\n00V+00H>00S,100\n01V+00H>01S,12.5\n", encoding="utf-8")
    bad = tmp_path / "bad.csv"
    bad.write_text("triplet,measured_eff\n00V+00H>00S,100\n01V,12.5\n", encoding="utf-8")

    assert read_measured_efficiencies(good) == {
        FUNDAMENTAL: 100.0,
        Triplet.parse("01V+00H>01S"): 12.5,
    }
    with pytest.raises(ConfigError, match="bad.csv:3:"):
        read_measured_efficiencies(bad)


def test_separation_report_document(tmp_path: Path) -> None:
    """Test a lone band is written without a neighbour."""
    report = band_separation_report(LinearIndexProvider(), [FUNDAMENTAL], 8.5, 4.8)

    document = read_json(
        write_separation_report(tmp_path / "separation.json", report), "separation_report"
    )

    assert document["all_isolated"] is True
    (band,) = document["bands"]
    assert band["nearest"] is None
    assert band["nearest_separation_nm"] is None
    assert document["separations"] == []
    assert document["unmatched"] == []
    assert band["phase_matched"] is True


def test_separation_report_document_unmatched(tmp_path: Path) -> None:
    """Test an unmatched band is written with empty center and width."""
    provider = LinearIndexProvider({"02V": 0.01})
    rootless = Triplet.parse("02V+00H>00S")
    report = band_separation_report(provider, [FUNDAMENTAL, rootless], 8.5, 4.8)

    document = read_json(
        write_separation_report(tmp_path / "separation.json", report), "separation_report"
    )

    assert document["unmatched"] == ["02V+00H>00S"]
    band = document["bands"][1]
    assert band["center_nm"] is None
    assert band["fwhm_nm"] is None
    assert band["phase_matched"] is False
