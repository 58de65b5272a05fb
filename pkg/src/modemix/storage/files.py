"""Readers and writers for CSV tables, JSON documents and PGM images.

CSV floats are written with ``repr`` so a reload is bit-identical. JSON
documents carry ``schema_version``, ``kind`` and ``generator``; sidecars add
``generated_at``, their only non-deterministic field.
"""

import csv
import json
import logging
import math
from collections.abc import Iterable, Sequence
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import numpy as np

from modemix import __version__
from modemix.dispersion import GeometricCorrections
from modemix.errors import ConfigError, LabelParseError, ScanValidationError
from modemix.identification import IdentificationResult, MeasuredScan
from modemix.models import Triplet
from modemix.modes import ModeField, mode_intensity_image
from modemix.overlap import EfficiencyRow
from modemix.phasematching import BandMap, CrossSection
from modemix.spdc import SeparationReport
from modemix.storage.schema import (
    BAND_MAP_COLUMNS,
    CROSS_SECTION_COLUMNS,
    EFFICIENCY_COLUMNS,
    KIND_BAND_MAP,
    KIND_CROSS_SECTION,
    KIND_IDENTIFICATION,
    KIND_MODES,
    KIND_PROFILE,
    KIND_SEPARATION,
    MEASURED_EFFICIENCY_COLUMNS,
    PROFILE_COLUMNS,
    SCAN_COLUMNS,
    SCHEMA_VERSION,
)
from modemix.waveguide import IndexGrid, render_profile

logger = logging.getLogger(__name__)


def _cell(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if value is None:
        return ""
    return str(value)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """Write a header row and records; floats use their shortest round-trip form."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    return path


def read_csv(path: Path, expected: Sequence[str]) -> list[dict[str, str]]:
    """Rows of a CSV file whose header contains the expected columns."""
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as handle:
            reader = csv.DictReader(handle)
            missing = [c for c in expected if c not in (reader.fieldnames or [])]
            if missing:
                raise ConfigError(f"{path}: missing column(s) {', '.join(missing)}")
            return list(reader)
    except FileNotFoundError:
        raise ConfigError(f"File not found: {path}") from None


def _document(kind: str, payload: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": kind,
        "generator": f"modemix {__version__}",
        **payload,
    }


def write_json(path: Path, document: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(document, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False)
    path.write_text(text + "\n", encoding="utf-8")
    return path


def read_json(path: Path, kind: str | None = None) -> dict:
    """Load a document, checking its schema version and, optionally, its kind."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"File not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"Invalid JSON in {path}: {exc}") from None
    if data.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(
            f"{path}: unsupported schema version {data.get('schema_version')!r}, "
            f"expected {SCHEMA_VERSION}"
        )
    if kind is not None and data.get("kind") != kind:
        raise ConfigError(f"{path}: expected a {kind!r} document, found {data.get('kind')!r}")
    return data


def sidecar_path(path: Path) -> Path:
    return Path(path).with_suffix(".json")


def write_sidecar(path: Path, kind: str, payload: dict) -> Path:
    """Metadata document next to a CSV file."""
    document = _document(kind, payload)
    document["generated_at"] = datetime.now(timezone.utc).isoformat()
    return write_json(sidecar_path(path), document)


def write_document(path: Path, kind: str, payload: dict) -> Path:
    return write_json(path, _document(kind, payload))


def write_band_map(path: Path, band: BandMap, kind: str = KIND_BAND_MAP) -> Path:
    """Band map as (λ_V, λ_H, intensity, valid) records, λ_V-major, plus a sidecar."""
    rows = (
        (band.lambda_v_nm[i], band.lambda_h_nm[j], band.intensity[i, j], band.valid[i, j])
        for i in range(band.lambda_v_nm.size)
        for j in range(band.lambda_h_nm.size)
    )
    write_csv(path, BAND_MAP_COLUMNS, rows)
    write_sidecar(
        path,
        kind,
        {
            "triplet": str(band.triplet),
            "period_um": band.period_um,
            "length_mm": band.length_mm,
            "filter_fwhm_nm": band.filter_fwhm_nm,
            "lambda_V_nm": [float(band.lambda_v_nm[0]), float(band.lambda_v_nm[-1])],
            "lambda_H_nm": [float(band.lambda_h_nm[0]), float(band.lambda_h_nm[-1])],
            "shape": [int(band.lambda_v_nm.size), int(band.lambda_h_nm.size)],
            "masked_cells": band.masked_count,
        },
    )
    return Path(path)


def write_cross_section(path: Path, section: CrossSection) -> Path:
    write_csv(path, CROSS_SECTION_COLUMNS, zip(section.wavelength_nm, section.intensity))
    write_sidecar(
        path,
        KIND_CROSS_SECTION,
        {
            "triplet": str(section.triplet),
            "period_um": section.period_um,
            "length_mm": section.length_mm,
            "masked_cells": int(np.count_nonzero(~section.valid)),
        },
    )
    return Path(path)


def write_scan(path: Path, scan: MeasuredScan) -> Path:
    return write_csv(path, SCAN_COLUMNS, zip(scan.wavelength_nm, scan.intensity))


def read_scan(path: Path) -> MeasuredScan:
    """Scan CSV (lambda_nm, intensity); the file stem names the scan."""
    path = Path(path)
    rows = read_csv(path, SCAN_COLUMNS)
    try:
        wavelength = np.array([float(r["lambda_nm"]) for r in rows])
        intensity = np.array([float(r["intensity"]) for r in rows])
    except ValueError as exc:
        raise ScanValidationError(f"{path}: non-numeric value ({exc})") from None
    return MeasuredScan(wavelength, intensity, name=path.stem, description=str(path))


def read_scans(directory: Path) -> list[MeasuredScan]:
    """Every ``*.csv`` scan in a directory, sorted by file name."""
    directory = Path(directory)
    if not directory.is_dir():
        raise ScanValidationError(f"Scan directory {directory} does not exist")
    scans = [read_scan(p) for p in sorted(directory.glob("*.csv"))]
    if not scans:
        raise ScanValidationError(f"No scan files (*.csv) in {directory}")
    return scans


def read_candidates(path: Path) -> list[Triplet]:
    """One triplet per line; blank lines and ``#`` comments are ignored."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except FileNotFoundError:
        raise ConfigError(f"File not found: {path}") from None
    triplets = []
    for number, line in enumerate(lines, start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        try:
            triplets.append(Triplet.parse(text))
        except LabelParseError as exc:
            raise LabelParseError(f"{path}:{number}: {exc}") from None
    return list(dict.fromkeys(triplets))


def write_candidates(path: Path, triplets: Iterable[Triplet]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(f"{t}\n" for t in triplets), encoding="utf-8")
    return path


def write_corrections(path: Path, corrections: GeometricCorrections) -> Path:
    return write_json(path, corrections.to_dict())


def read_corrections(path: Path) -> GeometricCorrections:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"File not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"Invalid JSON in {path}: {exc}") from None
    return GeometricCorrections.from_dict(data)


def mode_to_dict(mode: ModeField) -> dict:
    geometry = mode.geometry
    return {
        "label": str(mode.label),
        "wavelength_nm": mode.wavelength_nm,
        "n_eff": mode.n_eff,
        "orientation": mode.orientation.value,
        "residual": mode.residual,
        "geometry": {
            "x0": float(geometry.x[0]),
            "y0": float(geometry.y[0]),
            "hx": geometry.hx_um,
            "hy": geometry.hy_um,
            "nx": geometry.nx,
            "ny": geometry.ny,
        },
        "dominant": mode.dominant.tolist(),
        "minor": mode.minor.tolist(),
    }


def write_modes(path: Path, modes: Sequence[ModeField]) -> Path:
    """All fields of a solve in one document, arrays indexed [x][y]."""
    return write_document(path, KIND_MODES, {"modes": [mode_to_dict(m) for m in modes]})


def write_mode_image(path: Path, mode: ModeField) -> Path:
    """Plain (P2) 8-bit PGM of the intensity; rows run down in depth, columns along x."""
    image = np.rint(mode_intensity_image(mode).T * 255.0).astype(int)
    height, width = image.shape
    lines = ["P2", f"# {mode.label} n_eff={mode.n_eff!r}", f"{width} {height}", "255"]
    lines.extend(" ".join(str(v) for v in row) for row in image)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="ascii")
    return path


def write_profile(path: Path, grid: IndexGrid) -> Path:
    write_csv(path, PROFILE_COLUMNS, render_profile(grid))
    write_sidecar(
        path,
        KIND_PROFILE,
        {
            "axis": grid.axis.value,
            "wavelength_nm": grid.wavelength_nm,
            "bulk_index": grid.bulk_index,
            "geometry": grid.geometry.to_dict(),
        },
    )
    return Path(path)


def read_profile_csv(path: Path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(x, y, n[x, y]) from a profile CSV written x-major."""
    rows = read_csv(path, PROFILE_COLUMNS)
    if not rows:
        raise ConfigError(f"{path}: empty profile")
    xs = np.array([float(r["x_um"]) for r in rows])
    ys = np.array([float(r["y_um"]) for r in rows])
    values = np.array([float(r["n"]) for r in rows])
    x = np.unique(xs)
    y = np.unique(ys)
    if x.size * y.size != values.size:
        raise ConfigError(f"{path}: rows do not form a full {x.size} x {y.size} grid")
    return x, y, values.reshape(x.size, y.size)


def write_efficiency_table(path: Path, rows: Sequence[EfficiencyRow]) -> Path:
    return write_csv(
        path,
        EFFICIENCY_COLUMNS,
        (
            (
                str(r.triplet),
                r.degenerate_wavelength_nm,
                r.overlap,
                r.efficiency,
                r.measured,
            )
            for r in rows
        ),
    )


def identification_to_dict(result: IdentificationResult) -> dict:
    return {
        "period_um": result.period_um,
        "anchor_center_nm": result.anchor_center_nm,
        "flagged": result.flagged,
        "max_residual_nm": result.max_residual_nm,
        "differences": [
            {
                "first": str(d.first),
                "second": str(d.second),
                "difference": d.difference,
                "pair": [str(t) for t in d.pair],
            }
            for d in result.differences
        ],
        "scans": [
            {
                "name": report.scan_name,
                "unassigned_nm": list(report.unassigned_nm),
                "unmatched": [str(t) for t in report.unmatched],
                "bands": [
                    {
                        "center_nm": a.center_nm,
                        "triplet": str(a.triplet),
                        "predicted_nm": a.predicted_nm,
                        "residual_nm": a.residual_nm,
                        "flagged": a.flagged,
                    }
                    for a in report.assignments
                ],
            }
            for report in result.reports
        ],
        "corrections": result.corrections.to_dict()["entries"],
    }


def write_identification_report(path: Path, result: IdentificationResult) -> Path:
    return write_document(path, KIND_IDENTIFICATION, identification_to_dict(result))


def write_separation_report(path: Path, report: SeparationReport) -> Path:
    payload = {
        "length_mm": report.length_mm,
        "guard_nm": report.guard_nm,
        "all_isolated": report.all_isolated,
        "unmatched": [str(t) for t in report.unmatched],
        "bands": [
            {
                "triplet": str(b.triplet),
                "center_nm": b.center_nm if b.phase_matched else None,
                "fwhm_nm": b.fwhm_nm if b.phase_matched else None,
                "phase_matched": b.phase_matched,
                "isolated": b.isolated,
                "nearest": None if b.nearest is None else str(b.nearest),
                "nearest_separation_nm": None
                if math.isinf(b.nearest_separation_nm)
                else b.nearest_separation_nm,
            }
            for b in report.bands
        ],
        "separations": [
            {
                "first": str(s.first),
                "second": str(s.second),
                "separation_nm": s.separation_nm,
                "required_nm": s.required_nm,
                "resolved": s.resolved,
            }
            for s in report.separations
        ],
    }
    return write_document(path, KIND_SEPARATION, payload)


def read_measured_efficiencies(path: Path) -> dict[Triplet, float]:
    """Measured relative efficiencies keyed by triplet."""
    measured = {}
    for number, row in enumerate(read_csv(path, MEASURED_EFFICIENCY_COLUMNS), start=2):
        try:
            measured[Triplet.parse(row["triplet"])] = float(row["measured_eff"])
        except ValueError as exc:
            raise ConfigError(f"{path}:{number}: {exc}") from None
    return measured
