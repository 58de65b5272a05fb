"""Command-line interface.

Every command reads one configuration document (``--config``, the bundled
default when omitted) and writes plot-ready CSV tables with JSON sidecars.

Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 flagged results.
"""

import argparse
import csv
import logging
import sys
from collections.abc import Iterable, Sequence
from dataclasses import replace
from pathlib import Path
from typing import Any, Callable, Optional

import numpy as np

from modemix import __version__
from modemix.config import Backend, ProjectConfig, load_config
from modemix.dispersion import IndexProvider, extract_corrections, solve_at
from modemix.errors import NoPhaseMatchError, NumericalError, UnknownLabelError, ValidationError
from modemix.identification import identify_bands
from modemix.models import ModeLabel, Polarization, Triplet
from modemix.modes import ModeField
from modemix.overlap import efficiency_table, solve_triplet_modes
from modemix.phasematching import (
    WavelengthRange,
    band_fwhm,
    band_map,
    degenerate_scan,
    degenerate_wavelength,
    fit_poling_period,
    smear_band_map,
    smear_profile,
)
from modemix.spdc import band_separation_report, jsi, pump_mode_neighbors
from modemix.storage import (
    read_candidates,
    read_measured_efficiencies,
    read_scans,
    write_band_map,
    write_corrections,
    write_cross_section,
    write_csv,
    write_efficiency_table,
    write_identification_report,
    write_mode_image,
    write_modes,
    write_profile,
    write_separation_report,
)
from modemix.storage.schema import (
    ASSIGNMENT_COLUMNS,
    BAND_CENTER_COLUMNS,
    EFFICIENCY_COLUMNS,
    KIND_JSI,
    MODE_SUMMARY_COLUMNS,
    SEPARATION_COLUMNS,
)
from modemix.waveguide import index_profile

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3
EXIT_FLAGGED = 4

EXTRACTION_SAMPLES = 9

Handler = Callable[[argparse.Namespace, ProjectConfig], int]


def _text(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _emit_table(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_text(v) for v in row])


def _triplet(text: Optional[str], config: ProjectConfig) -> Triplet:
    return config.gauge.anchor_triplet if text is None else Triplet.parse(text)


def _range(text: Optional[str], config: ProjectConfig) -> WavelengthRange:
    if text is not None:
        return WavelengthRange.parse(text)
    settings = config.phase_matching
    return WavelengthRange(settings.search_min_nm, settings.search_max_nm, settings.step_nm)


def _field_wavelength(value: Optional[float], pol: Polarization, config: ProjectConfig) -> float:
    if value is not None:
        return value
    anchor = config.gauge.anchor_wavelength_nm
    return anchor / 2.0 if pol is Polarization.S else anchor


def _period(config: ProjectConfig, provider: IndexProvider) -> float:
    """Poling period: calibrated on the anchor band, or the configured value."""
    if not config.gauge.calibrate_period:
        return config.waveguide.poling_period_um
    gauge = config.gauge
    period = fit_poling_period(provider, gauge.anchor_triplet, gauge.anchor_wavelength_nm)
    logger.info(
        "Poling period %.6f µm places %s at %.3f nm",
        period,
        gauge.anchor_triplet,
        gauge.anchor_wavelength_nm,
    )
    return period


def _window(config: ProjectConfig) -> tuple[float, float]:
    return config.phase_matching.search_window


def cmd_solve_modes(args: argparse.Namespace, config: ProjectConfig) -> int:
    pol = Polarization.parse(args.pol)
    wavelength = _field_wavelength(args.wavelength, pol, config)
    if args.count is not None and args.count < 1:
        raise ValidationError(f"Mode count must be at least 1, got {args.count}")
    modes = solve_at(
        config.waveguide,
        config.load_material(),
        config.axes,
        pol,
        wavelength,
        config.solver,
        args.count,
    )
    rows = [(str(m.label), m.n_eff, m.residual, m.dominant_fraction) for m in modes]
    if args.out is not None:
        out = Path(args.out)
        write_modes(out / "modes.json", modes)
        write_csv(out / "summary.csv", MODE_SUMMARY_COLUMNS, rows)
        for mode in modes:
            write_mode_image(out / f"{mode.label}.pgm", mode)
    if not modes:
        print(f"no guided modes for {pol.value} at {wavelength!r} nm")
        return EXIT_OK
    _emit_table(MODE_SUMMARY_COLUMNS, rows)
    return EXIT_OK


def cmd_band_map(args: argparse.Namespace, config: ProjectConfig) -> int:
    triplet = _triplet(args.triplet, config)
    range_v = _range(args.range_v, config)
    range_h = _range(args.range_h, config)
    provider = config.provider(args.backend)
    period = _period(config, provider)
    band = band_map(
        provider,
        triplet,
        period,
        config.waveguide.length_mm,
        range_v,
        range_h,
        config.solver.workers,
    )
    band = smear_band_map(band, config.phase_matching.filter_fwhm_nm)
    write_band_map(args.out, band)
    lambda_v, lambda_h, peak = band.peak()
    logger.info("Band map peak %.4g at (%.3f, %.3f) nm", peak, lambda_v, lambda_h)
    return EXIT_OK


def cmd_degenerate_scan(args: argparse.Namespace, config: ProjectConfig) -> int:
    triplet = _triplet(args.triplet, config)
    wavelengths = _range(args.range, config)
    provider = config.provider(args.backend)
    period = _period(config, provider)
    section = degenerate_scan(provider, triplet, period, config.waveguide.length_mm, wavelengths)
    fwhm = config.phase_matching.filter_fwhm_nm
    if fwhm > 0:
        section = replace(
            section, intensity=smear_profile(section.wavelength_nm, section.intensity, fwhm)
        )
    write_cross_section(args.out, section)
    return EXIT_OK


def cmd_identify(args: argparse.Namespace, config: ProjectConfig) -> int:
    scans = read_scans(args.scans)
    candidates = read_candidates(args.candidates)
    gauge = config.gauge
    if args.anchor is not None:
        gauge = replace(gauge, anchor=args.anchor)
        gauge.validate()
    result = identify_bands(
        scans,
        candidates,
        config.model_provider(),
        gauge,
        config.waveguide.poling_period_um,
        _window(config),
        args.min_prominence,
    )
    out = Path(args.out)
    write_identification_report(out, result)
    corrections_out = args.corrections_out or out.with_name(f"{out.stem}_corrections.json")
    write_corrections(corrections_out, result.corrections)

    rows: list[tuple[Any, ...]] = []
    for report in result.reports:
        for entry in report.assignments:
            rows.append(
                (
                    report.scan_name,
                    entry.center_nm,
                    str(entry.triplet),
                    entry.predicted_nm,
                    entry.residual_nm,
                    int(entry.flagged),
                )
            )
        rows.extend((report.scan_name, c, None, None, None, None) for c in report.unassigned_nm)
    _emit_table(ASSIGNMENT_COLUMNS, rows)
    if result.flagged and not args.allow_flagged:
        print(
            f"modemix: {sum(len(r.flagged) for r in result.reports)} assignment(s) deviate more "
            f"than {gauge.flag_threshold_nm} nm from their prediction",
            file=sys.stderr,
        )
        return EXIT_FLAGGED
    return EXIT_OK


def cmd_jsi(args: argparse.Namespace, config: ProjectConfig) -> int:
    triplet = _triplet(args.triplet, config)
    range_v = _range(args.range_v, config)
    range_h = _range(args.range_h, config)
    provider = config.provider(args.backend)
    period = _period(config, provider)
    modes: dict[ModeLabel, ModeField] = {}
    if triplet.parity_allowed():
        modes = solve_triplet_modes(
            config.waveguide,
            config.load_material(),
            [Triplet.fundamental(), triplet],
            config.gauge.anchor_wavelength_nm,
            config.axes,
            config.solver,
        )
    amplitude = jsi(
        provider,
        triplet,
        period,
        config.waveguide.length_mm,
        config.pump,
        range_v,
        range_h,
        modes,
        config.solver.workers,
    )
    write_band_map(args.out, amplitude, KIND_JSI)
    return EXIT_OK


def cmd_overlap_table(args: argparse.Namespace, config: ProjectConfig) -> int:
    triplets = read_candidates(args.triplets)
    fundamental = Triplet.fundamental()
    if fundamental not in triplets:
        triplets.insert(0, fundamental)
    provider = config.provider(args.backend)
    period = _period(config, provider)
    modes = solve_triplet_modes(
        config.waveguide,
        config.load_material(),
        triplets,
        config.gauge.anchor_wavelength_nm,
        config.axes,
        config.solver,
    )
    measured = read_measured_efficiencies(args.measured) if args.measured else None
    rows = efficiency_table(
        triplets, modes, provider, period, _window(config), measured, config.solver.workers
    )
    if args.out is not None:
        write_efficiency_table(args.out, rows)
    _emit_table(
        EFFICIENCY_COLUMNS,
        (
            (str(r.triplet), r.degenerate_wavelength_nm, r.overlap, r.efficiency, r.measured)
            for r in rows
        ),
    )
    return EXIT_OK


def cmd_band_centers(args: argparse.Namespace, config: ProjectConfig) -> int:
    triplets = read_candidates(args.triplets)
    provider = config.provider(args.backend)
    period = _period(config, provider)
    window = _window(config)
    found: list[tuple[str, float, float]] = []
    missing: list[tuple[str, None, None]] = []
    for triplet in triplets:
        try:
            roots = degenerate_wavelength(
                provider, triplet, period, window, config.phase_matching.search_samples
            )
        except NoPhaseMatchError as exc:
            logger.info("%s: %s", triplet, exc)
            missing.append((str(triplet), None, None))
            continue
        width = band_fwhm(provider, triplet, period, config.waveguide.length_mm, roots[0], window)
        found.append((str(triplet), roots[0], width))
    rows = sorted(found, key=lambda row: row[1]) + missing
    if args.out is not None:
        write_csv(args.out, BAND_CENTER_COLUMNS, rows)
    _emit_table(BAND_CENTER_COLUMNS, rows)
    return EXIT_OK


def cmd_profile(args: argparse.Namespace, config: ProjectConfig) -> int:
    pol = Polarization.parse(args.pol)
    wavelength = _field_wavelength(args.wavelength, pol, config)
    grid = index_profile(
        config.waveguide,
        config.load_material(),
        config.axes.axis_for(pol),
        wavelength,
        subpixel=config.solver.subpixel,
        samples_per_cell=config.solver.samples_per_cell,
    )
    write_profile(args.out, grid)
    return EXIT_OK


def cmd_extract_corrections(args: argparse.Namespace, config: ProjectConfig) -> int:
    if args.labels:
        labels = [ModeLabel.parse(text) for text in args.labels.split(",") if text.strip()]
    else:
        labels = config.load_corrections().labels()
    if args.range is not None:
        wavelengths = WavelengthRange.parse(args.range).values()
    else:
        lo, hi = config.load_corrections().window_nm
        step = (hi - lo) / (EXTRACTION_SAMPLES - 1)
        wavelengths = lo + step * np.arange(EXTRACTION_SAMPLES)
    corrections = extract_corrections(
        config.waveguide,
        config.load_material(),
        labels,
        wavelengths,
        config.axes,
        config.solver,
    )
    write_corrections(args.out, corrections)
    _emit_table(
        ("label", "delta_n", "residual"),
        (
            (str(lab), corrections.delta(lab), corrections.residual(lab))
            for lab in corrections.labels()
        ),
    )
    return EXIT_OK


def cmd_separation(args: argparse.Namespace, config: ProjectConfig) -> int:
    triplets = read_candidates(args.triplets)
    provider = config.provider(args.backend)
    period = _period(config, provider)
    report = band_separation_report(
        provider, triplets, period, config.waveguide.length_mm, args.guard, _window(config)
    )
    if args.out is not None:
        write_separation_report(args.out, report)
    _emit_table(
        SEPARATION_COLUMNS,
        (
            (
                str(b.triplet),
                b.center_nm if b.phase_matched else None,
                b.fwhm_nm if b.phase_matched else None,
                None if b.nearest is None else str(b.nearest),
                None if b.nearest is None else b.nearest_separation_nm,
                int(b.isolated),
            )
            for b in report.bands
        ),
    )
    if not report.all_isolated and not args.allow_overlap:
        print("modemix: some bands overlap within their widths plus the guard", file=sys.stderr)
        return EXIT_FLAGGED
    return EXIT_OK


def cmd_neighbors(args: argparse.Namespace, config: ProjectConfig) -> int:
    reference = _triplet(args.triplet, config)
    pump_modes = read_candidates(args.triplets)
    provider = config.provider(args.backend)
    period = _period(config, provider)
    neighbors = pump_mode_neighbors(
        provider, reference, pump_modes, period, args.within, _window(config)
    )
    _emit_table(
        ("triplet", "center_nm", "offset_nm"),
        ((str(n.triplet), n.center_nm, n.offset_nm) for n in neighbors),
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per workflow step."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", type=Path, help="run configuration (TOML)")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    common.add_argument("-q", "--quiet", action="store_true", help="warnings and errors only")

    backend = argparse.ArgumentParser(add_help=False)
    backend.add_argument(
        "--backend",
        choices=[b.value for b in Backend],
        default=Backend.MODEL.value,
        help="effective indices from geometric corrections (model) or mode solves (numeric)",
    )

    parser = argparse.ArgumentParser(
        prog="modemix",
        description="Multimode three-wave mixing in periodically poled channel waveguides.",
    )
    parser.add_argument("--version", action="version", version=f"modemix {__version__}")
    commands = parser.add_subparsers(dest="command", required=True, metavar="command")

    def add(name: str, handler: Handler, help_text: str, *parents: argparse.ArgumentParser) -> Any:
        sub = commands.add_parser(name, parents=[common, *parents], help=help_text)
        sub.set_defaults(handler=handler)
        return sub

    sub = add("solve-modes", cmd_solve_modes, "solve guided modes of one polarization")
    sub.add_argument("--pol", default="V", help="V, H or S (default V)")
    sub.add_argument("--wavelength", type=float, help="nm; default the anchor (half for S)")
    sub.add_argument("--count", type=int, help="maximum number of modes")
    sub.add_argument("--out", type=Path, help="directory for modes.json, summary.csv, images")

    sub = add("band-map", cmd_band_map, "phase-matching band map over (λ_V, λ_H)", backend)
    sub.add_argument("--triplet", help="e.g. 00V+00H>00S; default the gauge anchor")
    sub.add_argument("--range-v", help="a:b[:step] nm")
    sub.add_argument("--range-h", help="a:b[:step] nm")
    sub.add_argument("--out", type=Path, required=True)

    sub = add("degenerate-scan", cmd_degenerate_scan, "cross section along λ_V = λ_H", backend)
    sub.add_argument("--triplet")
    sub.add_argument("--range", help="a:b[:step] nm")
    sub.add_argument("--out", type=Path, required=True)

    sub = add("identify", cmd_identify, "assign measured bands to mode triplets")
    sub.add_argument("--scans", type=Path, required=True, help="directory of scan CSV files")
    sub.add_argument("--candidates", type=Path, required=True, help="one triplet per line")
    sub.add_argument("--anchor", help="anchor triplet; default from the configuration")
    sub.add_argument("--out", type=Path, required=True, help="identification report (JSON)")
    sub.add_argument("--corrections-out", type=Path, help="fitted corrections (JSON)")
    sub.add_argument("--min-prominence", type=float, default=0.05)
    sub.add_argument("--allow-flagged", action="store_true", help="exit 0 despite flags")

    sub = add("jsi", cmd_jsi, "joint spectral intensity of a down-conversion band", backend)
    sub.add_argument("--triplet")
    sub.add_argument("--range-v")
    sub.add_argument("--range-h")
    sub.add_argument("--out", type=Path, required=True)

    sub = add("overlap-table", cmd_overlap_table, "relative conversion efficiencies", backend)
    sub.add_argument("--triplets", type=Path, required=True)
    sub.add_argument("--measured", type=Path, help="CSV with triplet, measured_eff")
    sub.add_argument("--out", type=Path)

    sub = add("band-centers", cmd_band_centers, "degenerate centers and widths", backend)
    sub.add_argument("--triplets", type=Path, required=True)
    sub.add_argument("--out", type=Path)

    sub = add("profile", cmd_profile, "dump the index profile n(x, y)")
    sub.add_argument("--pol", default="V")
    sub.add_argument("--wavelength", type=float)
    sub.add_argument("--out", type=Path, required=True)

    sub = add("extract-corrections", cmd_extract_corrections, "fit Δn per mode from solves")
    sub.add_argument("--labels", help="comma-separated labels; default the bundled set")
    sub.add_argument("--range", help="a:b[:step] nm; default the corrections window")
    sub.add_argument("--out", type=Path, required=True)

    sub = add("separation", cmd_separation, "check that bands can be filtered apart", backend)
    sub.add_argument("--triplets", type=Path, required=True)
    sub.add_argument("--guard", type=float, default=0.5, help="extra spacing in nm")
    sub.add_argument("--out", type=Path)
    sub.add_argument("--allow-overlap", action="store_true")

    sub = add("neighbors", cmd_neighbors, "bands of other pump modes near a band", backend)
    sub.add_argument("--triplet")
    sub.add_argument("--triplets", type=Path, required=True)
    sub.add_argument("--within", type=float, default=5.0, help="nm")
    return parser


def _configure_logging(verbose: bool, quiet: bool) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code is None:
            return EXIT_OK
        return exc.code if isinstance(exc.code, int) else EXIT_INVALID
    _configure_logging(args.verbose, args.quiet)
    try:
        config = load_config(args.config)
        handler: Handler = args.handler
        return handler(args, config)
    except (ValidationError, UnknownLabelError) as exc:
        print(f"modemix: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"modemix: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
