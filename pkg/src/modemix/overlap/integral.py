"""Spatial overlap of mode triplets and the relative efficiency table."""

import logging
import math
from collections.abc import Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy.integrate import trapezoid

from modemix.dispersion import IndexProvider, solve_at
from modemix.errors import (
    ContractError,
    GridMismatchError,
    NoPhaseMatchError,
    NormalizationError,
    UnknownLabelError,
)
from modemix.material import AxisMapping, SellmeierModel
from modemix.models import ModeLabel, Polarization, SolverSettings, Triplet, WaveguideSpec
from modemix.modes import ModeField
from modemix.phasematching import DEFAULT_SEARCH_WINDOW_NM, degenerate_wavelength

logger = logging.getLogger(__name__)

NORMALIZATION_TOLERANCE = 1e-6
REFERENCE_EFFICIENCY = 100.0


class Overlap(NamedTuple):
    signed: float
    magnitude: float


def overlap_integral(mode_v: ModeField, mode_h: ModeField, mode_s: ModeField) -> Overlap:
    """∫∫ u_V u_H u_S dA of the dominant components, trapezoid rule.

    Raises:
        GridMismatchError: The modes live on different grids.
        ContractError: A mode is not power-normalized.
    """
    geometry = mode_v.geometry
    for mode in (mode_h, mode_s):
        if mode.geometry != geometry:
            raise GridMismatchError(
                f"Mode {mode.label} is on grid {mode.geometry.shape} with steps "
                f"({mode.geometry.hx_um}, {mode.geometry.hy_um}) µm; resample it onto the grid "
                f"of {mode_v.label} first"
            )
    for mode in (mode_v, mode_h, mode_s):
        if not mode.is_normalized(NORMALIZATION_TOLERANCE):
            raise ContractError(f"Mode {mode.label} is not power-normalized (P = {mode.power:.6g})")
    product = mode_v.dominant * mode_h.dominant * mode_s.dominant
    value = float(trapezoid(trapezoid(product, geometry.y, axis=1), geometry.x))
    return Overlap(signed=value, magnitude=abs(value))


@dataclass(frozen=True)
class EfficiencyRow:
    """One line of the efficiency table."""

    triplet: Triplet
    degenerate_wavelength_nm: float
    overlap: float
    efficiency: float
    measured: Optional[float] = None

    @property
    def phase_matched(self) -> bool:
        return not math.isnan(self.degenerate_wavelength_nm)


def _mode(modes: Mapping[ModeLabel, ModeField], label: ModeLabel) -> ModeField:
    try:
        return modes[label]
    except KeyError:
        raise UnknownLabelError(f"No solved field for mode {label}") from None


def _first_root(
    provider: IndexProvider, triplet: Triplet, period_um: float, window: tuple[float, float]
) -> float:
    try:
        return degenerate_wavelength(provider, triplet, period_um, window)[0]
    except NoPhaseMatchError as exc:
        logger.info("%s", exc)
        return math.nan


def _reference_power(modes: Mapping[ModeLabel, ModeField]) -> float:
    reference = Triplet.fundamental()
    ref_overlap = overlap_integral(
        _mode(modes, reference.v), _mode(modes, reference.h), _mode(modes, reference.s)
    )
    if ref_overlap.magnitude == 0.0:
        raise NormalizationError(f"Reference overlap of {reference} is zero")
    return ref_overlap.magnitude**2


def relative_efficiency(triplet: Triplet, modes: Mapping[ModeLabel, ModeField]) -> float:
    """|O(t)|²/|O(00V+00H>00S)|², exactly 0 for a parity-forbidden triplet.

    Raises:
        UnknownLabelError: A needed field is missing from ``modes``.
    """
    if not triplet.parity_allowed():
        return 0.0
    value = overlap_integral(
        _mode(modes, triplet.v), _mode(modes, triplet.h), _mode(modes, triplet.s)
    )
    return value.magnitude**2 / _reference_power(modes)


def efficiency_table(
    triplets: Sequence[Triplet],
    modes: Mapping[ModeLabel, ModeField],
    provider: IndexProvider,
    period_um: float,
    window_nm: tuple[float, float] = DEFAULT_SEARCH_WINDOW_NM,
    measured: Optional[Mapping[Triplet, float]] = None,
    workers: int = 1,
) -> list[EfficiencyRow]:
    """Relative efficiencies 100·|O(t)|²/|O(00V+00H>00S)|².

    Args:
        triplets: Triplets to tabulate; must include the fundamental triplet.
        modes: Solved fields by label.
        provider: Index backend used to order rows by degenerate wavelength.
        period_um: Poling period.
        window_nm: Degenerate root search window.
        measured: Optional measured efficiencies to pair with the rows.
        workers: Threads computing rows.

    Returns:
        Rows ordered by degenerate wavelength; triplets without a root in the
        window come last with a NaN wavelength.
    """
    reference = Triplet.fundamental()
    if reference not in triplets:
        raise ContractError(f"Efficiency table needs the reference triplet {reference}")
    ref_power = _reference_power(modes)
    measured = measured or {}

    def row(triplet: Triplet) -> EfficiencyRow:
        value = overlap_integral(
            _mode(modes, triplet.v), _mode(modes, triplet.h), _mode(modes, triplet.s)
        )
        return EfficiencyRow(
            triplet=triplet,
            degenerate_wavelength_nm=_first_root(provider, triplet, period_um, window_nm),
            overlap=value.signed,
            efficiency=REFERENCE_EFFICIENCY * value.magnitude**2 / ref_power,
            measured=measured.get(triplet),
        )

    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(row, triplets))
    for entry in rows:
        if entry.efficiency > REFERENCE_EFFICIENCY and entry.triplet != reference:
            logger.warning(
                "%s has relative efficiency %.2f above the reference",
                entry.triplet,
                entry.efficiency,
            )
    return sorted(
        rows,
        key=lambda r: (not r.phase_matched, r.degenerate_wavelength_nm if r.phase_matched else 0.0),
    )


def solve_triplet_modes(
    spec: WaveguideSpec,
    material: SellmeierModel,
    triplets: Sequence[Triplet],
    anchor_nm: float,
    axes: Optional[AxisMapping] = None,
    settings: Optional[SolverSettings] = None,
) -> dict[ModeLabel, ModeField]:
    """Fields of every mode in a triplet list: V and H at the anchor, S at half of it."""
    axes = axes or AxisMapping.default()
    settings = settings or SolverSettings.default()
    wanted = {label for triplet in triplets for label in triplet.labels}
    modes: dict[ModeLabel, ModeField] = {}
    for pol in Polarization:
        labels = [label for label in wanted if label.pol is pol]
        if not labels:
            continue
        wavelength = anchor_nm / 2.0 if pol is Polarization.S else anchor_nm
        count = max(settings.mode_count, len(labels))
        found = solve_at(spec, material, axes, pol, wavelength, settings, count)
        solved = {m.label: m for m in found}
        for label in labels:
            if label not in solved:
                raise UnknownLabelError(
                    f"Mode {label} is not guided at {wavelength} nm "
                    f"(solved: {', '.join(str(lab) for lab in solved) or 'none'})"
                )
            modes[label] = solved[label]
    return modes
