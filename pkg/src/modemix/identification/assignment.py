"""Matching detected band centers to candidate triplets."""

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from modemix.dispersion import CorrectionsIndexProvider, IndexProvider
from modemix.errors import ContractError, NoPhaseMatchError
from modemix.identification.fitting import CorrectionDifference
from modemix.models import Triplet
from modemix.phasematching import DEFAULT_SEARCH_WINDOW_NM, degenerate_wavelength

logger = logging.getLogger(__name__)

FLAG_THRESHOLD_NM = 0.2
OPTIMAL_ASSIGNMENT_LIMIT = 12


@dataclass(frozen=True)
class BandAssignment:
    """A detected band with the triplet explaining it."""

    center_nm: float
    triplet: Triplet
    predicted_nm: float
    flag_threshold_nm: float = FLAG_THRESHOLD_NM
    differences: tuple[CorrectionDifference, ...] = ()

    @property
    def residual_nm(self) -> float:
        return abs(self.center_nm - self.predicted_nm)

    @property
    def flagged(self) -> bool:
        return self.residual_nm > self.flag_threshold_nm


@dataclass(frozen=True)
class AssignmentReport:
    """Assignments of one scan plus the centers no candidate explains."""

    assignments: tuple[BandAssignment, ...]
    unassigned_nm: tuple[float, ...] = ()
    unmatched: tuple[Triplet, ...] = field(default=())
    scan_name: str = ""

    @property
    def flagged(self) -> list[BandAssignment]:
        return [a for a in self.assignments if a.flagged]

    @property
    def max_residual_nm(self) -> float:
        return max((a.residual_nm for a in self.assignments), default=0.0)

    def triplets(self) -> list[Triplet]:
        return [a.triplet for a in self.assignments]


def predict_centers(
    provider: IndexProvider,
    candidates: Sequence[Triplet],
    period_um: float,
    window_nm: tuple[float, float] = DEFAULT_SEARCH_WINDOW_NM,
) -> dict[Triplet, float]:
    """First degenerate root of each candidate; candidates without one are left out."""
    predicted: dict[Triplet, float] = {}
    for triplet in candidates:
        try:
            roots = degenerate_wavelength(provider, triplet, period_um, window_nm)
        except NoPhaseMatchError:
            logger.info("Candidate %s has no band in [%s, %s] nm", triplet, *window_nm)
            continue
        if len(roots) > 1:
            logger.warning(
                "Candidate %s has %d bands in the window; using the first", triplet, len(roots)
            )
        predicted[triplet] = roots[0]
    return predicted


def _greedy(cost: np.ndarray) -> list[tuple[int, int]]:
    # smallest cost first; ties go to the earlier candidate, then the earlier center
    order = sorted(
        ((cost[i, j], j, i) for i in range(cost.shape[0]) for j in range(cost.shape[1])),
    )
    used_rows: set[int] = set()
    used_cols: set[int] = set()
    pairs = []
    for _, j, i in order:
        if i in used_rows or j in used_cols:
            continue
        used_rows.add(i)
        used_cols.add(j)
        pairs.append((i, j))
    return pairs


def assign_triplets(
    centers: Sequence[float],
    candidates: Sequence[Triplet],
    provider: IndexProvider,
    period_um: float,
    window_nm: tuple[float, float] = DEFAULT_SEARCH_WINDOW_NM,
    flag_threshold_nm: float = FLAG_THRESHOLD_NM,
    scan_name: str = "",
) -> AssignmentReport:
    """Assign centers to candidate triplets minimizing the total |residual|.

    Up to twelve centers and candidates are matched optimally; larger
    problems use the greedy nearest-neighbour matching.

    Args:
        centers: Detected band centers (nm).
        candidates: Triplets that may explain the bands.
        provider: Index backend predicting band centers.
        period_um: Poling period.
        window_nm: Root search window.
        flag_threshold_nm: Residual above which an assignment is flagged.
        scan_name: Name carried into the report.
    """
    if isinstance(provider, CorrectionsIndexProvider):
        missing = [
            str(label)
            for t in candidates
            for label in t.labels
            if label not in provider.corrections.values
        ]
        if missing:
            raise ContractError(f"Corrections do not cover modes {', '.join(sorted(set(missing)))}")
    predicted = predict_centers(provider, candidates, period_um, window_nm)
    names = list(predicted)
    measured = np.asarray(sorted(centers), dtype=float)
    if measured.size == 0 or not names:
        return AssignmentReport((), tuple(measured.tolist()), tuple(names), scan_name)

    cost = np.abs(measured[:, None] - np.array([predicted[t] for t in names])[None, :])
    if measured.size <= OPTIMAL_ASSIGNMENT_LIMIT and len(names) <= OPTIMAL_ASSIGNMENT_LIMIT:
        rows, cols = linear_sum_assignment(cost)
        pairs = list(zip(rows.tolist(), cols.tolist()))
    else:
        pairs = _greedy(cost)

    assignments = tuple(
        sorted(
            (
                BandAssignment(
                    float(measured[i]), names[j], predicted[names[j]], flag_threshold_nm
                )
                for i, j in pairs
            ),
            key=lambda a: a.center_nm,
        )
    )
    taken_rows = {i for i, _ in pairs}
    taken_cols = {j for _, j in pairs}
    unassigned = tuple(float(measured[i]) for i in range(measured.size) if i not in taken_rows)
    unmatched = tuple(names[j] for j in range(len(names)) if j not in taken_cols)
    if unassigned:
        logger.warning(
            "%d band center(s) without a candidate (impure mode excitation?): %s",
            len(unassigned),
            ", ".join(f"{c:.3f}" for c in unassigned),
        )
    for entry in assignments:
        if entry.flagged:
            logger.warning(
                "%s at %.3f nm deviates %.3f nm from its prediction %.3f nm",
                entry.triplet,
                entry.center_nm,
                entry.residual_nm,
                entry.predicted_nm,
            )
    return AssignmentReport(assignments, unassigned, unmatched, scan_name)
