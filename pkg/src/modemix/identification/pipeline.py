"""End-to-end band identification over a set of measured scans."""

import logging
from collections.abc import Sequence
from dataclasses import dataclass, replace

import numpy as np

from modemix.dispersion import CorrectionsIndexProvider, GeometricCorrections
from modemix.errors import ScanValidationError
from modemix.identification.assignment import AssignmentReport, assign_triplets
from modemix.identification.fitting import (
    CorrectionDifference,
    corrections_from_differences,
    fit_correction_differences,
    pair_differences,
)
from modemix.identification.scan import MeasuredScan, detect_band_centers
from modemix.models import GaugeSettings, ModeLabel, Polarization, Triplet
from modemix.phasematching import (
    DEFAULT_SEARCH_WINDOW_NM,
    degenerate_wavelength,
    fit_poling_period,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class IdentificationResult:
    """Fitted corrections, calibrated period and per-scan assignments."""

    corrections: GeometricCorrections
    period_um: float
    anchor_center_nm: float
    differences: tuple[CorrectionDifference, ...]
    reports: tuple[AssignmentReport, ...]

    @property
    def flagged(self) -> bool:
        return any(report.flagged for report in self.reports)

    @property
    def max_residual_nm(self) -> float:
        return max((r.max_residual_nm for r in self.reports), default=0.0)

    def centers(self) -> dict[Triplet, float]:
        return _mean_centers(self.reports)


def _mean_centers(reports: Sequence[AssignmentReport]) -> dict[Triplet, float]:
    collected: dict[Triplet, list[float]] = {}
    for report in reports:
        for entry in report.assignments:
            collected.setdefault(entry.triplet, []).append(entry.center_nm)
    return {t: float(np.mean(values)) for t, values in collected.items()}


def gauge_anchors(prior: GeometricCorrections, reference: float) -> dict[ModeLabel, float]:
    """Fundamental-mode anchors with Δn(00V) = reference.

    The shift of 00V is balanced on 00H so that 2Δn_S − Δn_V − Δn_H of every
    triplet, and with it every band center, is unchanged.
    """
    v00 = ModeLabel(0, 0, Polarization.V)
    h00 = ModeLabel(0, 0, Polarization.H)
    s00 = ModeLabel(0, 0, Polarization.S)
    shift = reference - prior.delta(v00)
    return {v00: reference, h00: prior.delta(h00) - shift, s00: prior.delta(s00)}


def identify_bands(
    scans: Sequence[MeasuredScan],
    candidates: Sequence[Triplet],
    prior: CorrectionsIndexProvider,
    gauge: GaugeSettings,
    period_um: float,
    window_nm: tuple[float, float] = DEFAULT_SEARCH_WINDOW_NM,
    min_prominence: float = 0.05,
) -> IdentificationResult:
    """Identify the triplets behind the bands of a set of degenerate scans.

    Steps: detect centers; calibrate Λ on the anchor band; assign with the
    prior corrections; fit correction differences from pairs of assigned bands
    that share two modes; recalibrate Λ and assign again with the fitted model.

    Args:
        scans: Measured degenerate scans, at least one.
        candidates: Triplets that may appear in the scans.
        prior: Model backend with prior corrections covering every candidate.
        gauge: Anchor triplet, reference correction and flag threshold.
        period_um: Nominal poling period, used when calibration is off.
        window_nm: Root search window.
        min_prominence: Peak prominence threshold (fraction of the scan maximum).
    """
    if not scans:
        raise ScanValidationError("No scans to identify")
    anchor = gauge.anchor_triplet
    centers_by_scan = [detect_band_centers(scan, min_prominence) for scan in scans]
    all_centers = [c for centers in centers_by_scan for c in centers]

    expected = gauge.anchor_wavelength_nm
    if not gauge.calibrate_period:
        roots = degenerate_wavelength(prior, anchor, period_um, window_nm)
        expected = min(roots, key=lambda r: abs(r - gauge.anchor_wavelength_nm))
    anchor_center = expected
    if all_centers:
        anchor_center = min(all_centers, key=lambda c: abs(c - expected))
    else:
        logger.warning("No band centers detected in %d scan(s)", len(scans))
    period = period_um
    if gauge.calibrate_period:
        period = fit_poling_period(prior, anchor, anchor_center)
    logger.info("Anchor %s at %.4f nm, poling period %.6f µm", anchor, anchor_center, period)

    def assign_all(
        provider: CorrectionsIndexProvider, period_now: float
    ) -> tuple[AssignmentReport, ...]:
        return tuple(
            assign_triplets(
                centers,
                candidates,
                provider,
                period_now,
                window_nm,
                gauge.flag_threshold_nm,
                scan.name,
            )
            for scan, centers in zip(scans, centers_by_scan)
        )

    initial = assign_all(prior, period)
    band_centers = _mean_centers(initial)
    pairs = pair_differences(sorted(band_centers, key=band_centers.__getitem__))
    differences = fit_correction_differences(pairs, band_centers, prior, period)
    fitted = corrections_from_differences(
        differences, gauge_anchors(prior.corrections, gauge.reference_correction), prior.corrections
    )
    model = prior.with_corrections(fitted)
    if gauge.calibrate_period:
        period = fit_poling_period(model, anchor, anchor_center)
    final = assign_all(model, period)

    used = {d.pair: d for d in differences}
    reports = []
    for report in final:
        entries = tuple(
            replace(
                entry,
                differences=tuple(d for pair, d in used.items() if entry.triplet in pair),
            )
            for entry in report.assignments
        )
        reports.append(replace(report, assignments=entries))
    result = IdentificationResult(fitted, period, anchor_center, tuple(differences), tuple(reports))
    logger.info(
        "Identified %d band(s) in %d scan(s); max residual %.4f nm",
        sum(len(r.assignments) for r in reports),
        len(reports),
        result.max_residual_nm,
    )
    return result
