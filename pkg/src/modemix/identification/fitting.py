"""Correction differences from pairs of bands that share two modes.

At a degenerate center λ (µm) the phase-matching condition of a triplet reads

    λ/Λ − M(λ) = 2Δn_S − Δn_V − Δn_H,   M(λ) = 2 n_S(λ/2) − n_V(λ) − n_H(λ)

with bulk indices M. Two triplets that differ in one slot therefore fix the
difference of the two corrections in that slot.
"""

import itertools
import logging
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from modemix.dispersion import CorrectionsIndexProvider, GeometricCorrections
from modemix.errors import ContractError, UnknownLabelError
from modemix.models import ModeLabel, Polarization, Triplet
from modemix.phasematching import sum_frequency_wavelength

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CorrectionDifference:
    """Δn(first) − Δn(second) obtained from one pair of bands."""

    first: ModeLabel
    second: ModeLabel
    difference: float
    pair: tuple[Triplet, Triplet]

    @property
    def pol(self) -> Polarization:
        return self.first.pol

    def __str__(self) -> str:
        return f"Δn({self.first}) − Δn({self.second}) = {self.difference:+.6e}"


def observed_combination(
    provider: CorrectionsIndexProvider, wavelength_nm: float, period_um: float
) -> float:
    """2Δn_S − Δn_V − Δn_H implied by a degenerate center."""
    lam_um = wavelength_nm / 1000.0
    lam_s = sum_frequency_wavelength(wavelength_nm, wavelength_nm)
    bulk = (
        2.0 * float(provider.bulk_index(Polarization.S, lam_s))
        - float(provider.bulk_index(Polarization.V, wavelength_nm))
        - float(provider.bulk_index(Polarization.H, wavelength_nm))
    )
    return lam_um / period_um - bulk


def pair_differences(triplets: Iterable[Triplet]) -> list[tuple[Triplet, Triplet]]:
    """All pairs of distinct triplets that differ in exactly one slot, in input order."""
    unique = list(dict.fromkeys(triplets))
    return [(a, b) for a, b in itertools.combinations(unique, 2) if len(a.differing_slots(b)) == 1]


def fit_correction_differences(
    pairs: Sequence[tuple[Triplet, Triplet]],
    centers: Mapping[Triplet, float],
    provider: CorrectionsIndexProvider,
    period_um: float,
) -> list[CorrectionDifference]:
    """Solve the phase-matching condition of each pair for its one unknown difference.

    Args:
        pairs: Triplet pairs differing in exactly one slot.
        centers: Measured degenerate center (nm) of every triplet in ``pairs``.
        provider: Model backend supplying the bulk dispersion.
        period_um: Calibrated poling period.

    Returns:
        One difference per pair, in pair order.
    """
    results = []
    for first, second in pairs:
        slots = first.differing_slots(second)
        if len(slots) != 1:
            raise ContractError(
                f"Pair {first} / {second} differs in {len(slots)} slots; exactly one is needed"
            )
        try:
            c_first = observed_combination(provider, centers[first], period_um)
            c_second = observed_combination(provider, centers[second], period_um)
        except KeyError as exc:
            raise ContractError(f"No measured center for {exc.args[0]}") from None
        slot = slots[0]
        if slot is Polarization.S:
            difference = (c_first - c_second) / 2.0
        else:
            difference = -(c_first - c_second)
        result = CorrectionDifference(
            first.label_for(slot), second.label_for(slot), difference, (first, second)
        )
        logger.debug("%s from %s / %s", result, first, second)
        results.append(result)
    return results


def corrections_from_differences(
    differences: Sequence[CorrectionDifference],
    anchors: Mapping[ModeLabel, float],
    prior: GeometricCorrections,
) -> GeometricCorrections:
    """Gauge-fixed corrections from measured differences.

    For every polarization the labels linked to its anchor through measured
    differences are solved by least squares with the anchor held fixed.
    Labels without such a link keep their prior value.
    """
    values = dict(prior.values)
    for pol in Polarization:
        anchor = next((label for label in anchors if label.pol is pol), None)
        rows = [d for d in differences if d.pol is pol]
        if anchor is None:
            if rows:
                raise ContractError(f"No gauge anchor for the {pol.value} corrections")
            continue
        values[anchor] = anchors[anchor]
        labels = list(dict.fromkeys([anchor] + [x for d in rows for x in (d.first, d.second)]))
        index = {label: k for k, label in enumerate(labels)}
        graph = coo_matrix(
            (
                np.ones(len(rows)),
                ([index[d.first] for d in rows], [index[d.second] for d in rows]),
            ),
            shape=(len(labels), len(labels)),
        )
        _, component = connected_components(graph, directed=False)
        linked = [lab for lab in labels if component[index[lab]] == component[0] and lab != anchor]
        unlinked = [lab for lab in labels if component[index[lab]] != component[0]]
        for label in unlinked:
            if label not in prior.values:
                raise UnknownLabelError(
                    f"Mode {label} has no prior correction and no link to {anchor}"
                )
            logger.warning(
                "Mode %s is not linked to anchor %s; keeping its prior value", label, anchor
            )
        rows = [d for d in rows if component[index[d.first]] == component[0]]
        if not linked:
            continue
        column = {label: k for k, label in enumerate(linked)}
        matrix = np.zeros((len(rows), len(linked)))
        rhs = np.zeros(len(rows))
        for r, diff in enumerate(rows):
            rhs[r] = diff.difference
            for label, sign in ((diff.first, 1.0), (diff.second, -1.0)):
                if label == anchor:
                    rhs[r] -= sign * anchors[anchor]
                else:
                    matrix[r, column[label]] = sign
        solution, *_ = np.linalg.lstsq(matrix, rhs, rcond=None)
        for label, value in zip(linked, solution):
            values[label] = float(value)
    return GeometricCorrections(values, prior.window_nm)
