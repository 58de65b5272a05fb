"""Down-conversion design: pump envelope, joint spectral intensity and band separation."""

import logging
import math
from collections.abc import Mapping, Sequence
from dataclasses import asdict, dataclass, replace
from typing import Optional

import numpy as np

from modemix.dispersion import IndexProvider
from modemix.errors import ConfigError, ContractError, NoPhaseMatchError, ValidationError
from modemix.models import ModeLabel, Triplet
from modemix.modes import ModeField
from modemix.overlap import relative_efficiency
from modemix.phasematching import (
    DEFAULT_SEARCH_WINDOW_NM,
    BandMap,
    WavelengthRange,
    band_fwhm,
    band_map,
    degenerate_wavelength,
    sum_frequency_wavelength,
)

logger = logging.getLogger(__name__)

DEFAULT_GUARD_NM = 0.5


@dataclass
class PumpSpec:
    """Gaussian pump spectrum in vacuum wavelength."""

    center_nm: float = 399.8
    fwhm_nm: float = 1.0

    @classmethod
    def default(cls) -> "PumpSpec":
        return cls()

    def validate(self) -> None:
        if not self.center_nm > 0:
            raise ValidationError(f"Pump center must be > 0 nm, got {self.center_nm}")
        if not self.fwhm_nm > 0:
            raise ValidationError(f"Pump FWHM must be > 0 nm, got {self.fwhm_nm}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "PumpSpec":
        unknown = set(data) - {"center_nm", "fwhm_nm"}
        if unknown:
            raise ConfigError(f"Unknown keys in [pump]: {', '.join(sorted(unknown))}")
        pump = cls(
            center_nm=float(data.get("center_nm", cls.center_nm)),
            fwhm_nm=float(data.get("fwhm_nm", cls.fwhm_nm)),
        )
        pump.validate()
        return pump


def pump_envelope(
    pump: PumpSpec, wavelength_v_nm: "float | np.ndarray", wavelength_h_nm: "float | np.ndarray"
) -> "float | np.ndarray":
    """exp(−4 ln2 (λ_S − λ_p)² / FWHM²) with λ_S fixed by energy conservation."""
    lambda_s = sum_frequency_wavelength(wavelength_v_nm, wavelength_h_nm)
    weight = np.exp(-4.0 * math.log(2.0) * (lambda_s - pump.center_nm) ** 2 / pump.fwhm_nm**2)
    if np.ndim(weight) == 0:
        return float(weight)
    return weight


def jsi(
    provider: IndexProvider,
    triplet: Triplet,
    period_um: float,
    length_mm: float,
    pump: PumpSpec,
    range_v: WavelengthRange,
    range_h: WavelengthRange,
    modes: Mapping[ModeLabel, ModeField],
    workers: int = 1,
) -> BandMap:
    """Joint spectral intensity: relative efficiency · sinc²(ΔβL/2) · pump envelope.

    Args:
        provider: Index backend.
        triplet: Mode triplet.
        period_um: Poling period.
        length_mm: Interaction length.
        pump: Pump spectrum.
        range_v: λ_V grid.
        range_h: λ_H grid.
        modes: Solved fields of the triplet and of 00V+00H>00S; a
            parity-forbidden triplet needs none and gives a zero JSI.
        workers: Threads evaluating map rows.
    """
    pump.validate()
    efficiency = relative_efficiency(triplet, modes)
    logger.info("Relative efficiency of %s: %.4g", triplet, efficiency)
    phase_matching = band_map(provider, triplet, period_um, length_mm, range_v, range_h, workers)
    envelope = pump_envelope(
        pump, phase_matching.lambda_v_nm[:, None], phase_matching.lambda_h_nm[None, :]
    )
    intensity = efficiency * phase_matching.intensity * envelope
    return replace(phase_matching, intensity=np.where(phase_matching.valid, intensity, 0.0))


@dataclass(frozen=True)
class BandEntry:
    triplet: Triplet
    center_nm: float
    fwhm_nm: float
    isolated: bool
    nearest: Optional[Triplet] = None
    nearest_separation_nm: float = math.inf

    @property
    def phase_matched(self) -> bool:
        return not math.isnan(self.center_nm)


@dataclass(frozen=True)
class Separation:
    first: Triplet
    second: Triplet
    separation_nm: float
    required_nm: float

    @property
    def resolved(self) -> bool:
        return self.separation_nm > self.required_nm


@dataclass(frozen=True)
class SeparationReport:
    """Degenerate centers, widths and pairwise separations of a set of bands."""

    bands: tuple[BandEntry, ...]
    separations: tuple[Separation, ...]
    length_mm: float
    guard_nm: float

    @property
    def all_isolated(self) -> bool:
        """Every band with a root in the window is isolated."""
        return all(entry.isolated for entry in self.bands if entry.phase_matched)

    @property
    def unmatched(self) -> tuple[Triplet, ...]:
        return tuple(entry.triplet for entry in self.bands if not entry.phase_matched)

    def entry(self, triplet: Triplet) -> BandEntry:
        for band in self.bands:
            if band.triplet == triplet:
                return band
        raise KeyError(str(triplet))


def _center(
    provider: IndexProvider, triplet: Triplet, period_um: float, window: tuple[float, float]
) -> float:
    try:
        return degenerate_wavelength(provider, triplet, period_um, window)[0]
    except NoPhaseMatchError as exc:
        logger.info("%s", exc)
        return math.nan


def band_separation_report(
    provider: IndexProvider,
    triplets: Sequence[Triplet],
    period_um: float,
    length_mm: float,
    guard_nm: float = DEFAULT_GUARD_NM,
    window_nm: tuple[float, float] = DEFAULT_SEARCH_WINDOW_NM,
) -> SeparationReport:
    """Check whether bands sharing one pump mode can be told apart by filtering.

    A band is isolated when every other band's center lies further away than
    half the sum of the two widths plus ``guard_nm``. A triplet without a root
    in the window is reported unmatched (NaN center and width, not isolated)
    and left out of the pairwise separations.

    Raises:
        NoPhaseMatchError: No triplet has a root in the window.
    """
    if not triplets:
        raise ContractError("Separation report needs at least one triplet")
    pumps = {t.s for t in triplets}
    if len(pumps) > 1:
        raise ContractError(
            f"Separation report needs one pump mode, got {', '.join(sorted(map(str, pumps)))}"
        )
    centers = {t: _center(provider, t, period_um, window_nm) for t in triplets}
    matched = [t for t in triplets if not math.isnan(centers[t])]
    if not matched:
        raise NoPhaseMatchError(
            f"No band of {len(triplets)} triplet(s) phase-matches in {window_nm[0]:g}-"
            f"{window_nm[1]:g} nm at period {period_um:.6g} µm"
        )
    widths = {
        t: band_fwhm(provider, t, period_um, length_mm, centers[t], window_nm)
        if t in matched
        else math.nan
        for t in triplets
    }
    separations = []
    for k, first in enumerate(matched):
        for second in matched[k + 1 :]:
            separations.append(
                Separation(
                    first,
                    second,
                    abs(centers[second] - centers[first]),
                    (widths[first] + widths[second]) / 2.0 + guard_nm,
                )
            )
    bands = []
    for triplet in triplets:
        mine = [s for s in separations if triplet in (s.first, s.second)]
        nearest = min(mine, key=lambda s: s.separation_nm, default=None)
        bands.append(
            BandEntry(
                triplet=triplet,
                center_nm=centers[triplet],
                fwhm_nm=widths[triplet],
                isolated=triplet in matched and all(s.resolved for s in mine),
                nearest=None
                if nearest is None
                else (nearest.second if nearest.first == triplet else nearest.first),
                nearest_separation_nm=math.inf if nearest is None else nearest.separation_nm,
            )
        )
    report = SeparationReport(tuple(bands), tuple(separations), length_mm, guard_nm)
    logger.info(
        "Separation report for %d band(s) at L = %.2f mm: %s",
        len(bands),
        length_mm,
        "all isolated" if report.all_isolated else "overlapping bands present",
    )
    if report.unmatched:
        logger.warning("Unmatched band(s): %s", ", ".join(str(t) for t in report.unmatched))
    return report


@dataclass(frozen=True)
class NeighborBand:
    triplet: Triplet
    center_nm: float
    offset_nm: float


def pump_mode_neighbors(
    provider: IndexProvider,
    reference: Triplet,
    pump_modes: Sequence[Triplet],
    period_um: float,
    within_nm: float = 5.0,
    window_nm: tuple[float, float] = DEFAULT_SEARCH_WINDOW_NM,
) -> list[NeighborBand]:
    """Bands of the same fundamental pair pumped in other sum-frequency modes.

    Lists every triplet of ``pump_modes`` that shares the V and H modes of
    ``reference`` but not its S mode and whose degenerate center lies within
    ``within_nm`` of the reference center; such bands are excited when the
    pump is not spatially pure.
    """
    center = degenerate_wavelength(provider, reference, period_um, window_nm)[0]
    neighbors = []
    for triplet in pump_modes:
        if (triplet.v, triplet.h) != (reference.v, reference.h) or triplet.s == reference.s:
            continue
        try:
            roots = degenerate_wavelength(provider, triplet, period_um, window_nm)
        except NoPhaseMatchError as exc:
            logger.debug("%s: %s", triplet, exc)
            continue
        nearest = min(roots, key=lambda r: abs(r - center))
        if abs(nearest - center) <= within_nm:
            neighbors.append(NeighborBand(triplet, nearest, nearest - center))
    return sorted(neighbors, key=lambda n: abs(n.offset_nm))
