"""Effective indices per mode: bulk dispersion plus geometric corrections.

Two interchangeable backends implement :class:`IndexProvider`:

* :class:`CorrectionsIndexProvider` adds a constant Δn per mode label to the
  bulk index of the polarization's crystal axis;
* :class:`SolverIndexProvider` solves the waveguide at every requested
  wavelength and looks the label up among the solved modes.
"""

import logging
import math
import threading
from collections import OrderedDict
from collections.abc import Iterable, Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Protocol, Union

import numpy as np

from modemix import __version__
from modemix.errors import (
    ConfigError,
    ModeTrackingError,
    UnknownLabelError,
    ValidationError,
)
from modemix.material import AxisMapping, SellmeierModel, refractive_index
from modemix.models import ModeLabel, Polarization, SolverSettings, WaveguideSpec
from modemix.modes import ModeField, inner_product, solve_modes
from modemix.waveguide import index_profile

logger = logging.getLogger(__name__)

CORRECTIONS_SCHEMA_VERSION = 1
TRACKING_OVERLAP_THRESHOLD = 0.5
# wavelength decimals (nm) of a cache key
CACHE_DIGITS = 9
INDEX_CACHE_SIZE = 4096
SOLVE_CACHE_SIZE = 16

ArrayLike = Union[float, np.ndarray]


class IndexProvider(Protocol):
    """Calling contract shared by both effective-index backends."""

    def effective_index(self, label: ModeLabel, wavelength_nm: ArrayLike) -> ArrayLike:
        """n_eff of a labelled mode; shape follows ``wavelength_nm``."""
        ...

    def in_range(self, pol: Polarization, wavelength_nm: ArrayLike) -> np.ndarray:
        """Mask of wavelengths the backend can evaluate for a polarization."""
        ...


@dataclass(frozen=True, eq=False)
class GeometricCorrections:
    """Constant Δn per mode label, with the window it holds over."""

    values: Mapping[ModeLabel, float]
    window_nm: tuple[float, float]
    residuals: Mapping[ModeLabel, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        lo, hi = self.window_nm
        if not lo < hi:
            raise ValidationError(f"Corrections window [{lo}, {hi}] nm is empty")
        for label, value in self.values.items():
            if not math.isfinite(value):
                raise ValidationError(f"Correction for {label} is not finite: {value}")
        for label, residual in self.residuals.items():
            if not residual >= 0:
                raise ValidationError(f"Residual for {label} must be >= 0, got {residual}")

    def delta(self, label: ModeLabel) -> float:
        try:
            return self.values[label]
        except KeyError:
            raise UnknownLabelError(f"No geometric correction for mode {label}") from None

    def residual(self, label: ModeLabel) -> float:
        return self.residuals.get(label, 0.0)

    def labels(self, pol: Polarization | None = None) -> list[ModeLabel]:
        chosen = [lab for lab in self.values if pol is None or lab.pol is pol]
        return sorted(chosen, key=ModeLabel.sort_key)

    def covers(self, labels: Iterable[ModeLabel]) -> bool:
        return all(label in self.values for label in labels)

    def with_values(self, updates: Mapping[ModeLabel, float]) -> "GeometricCorrections":
        """Copy with some Δn replaced; residuals of replaced labels are dropped."""
        values = dict(self.values)
        values.update(updates)
        residuals = {k: v for k, v in self.residuals.items() if k not in updates}
        return GeometricCorrections(values, self.window_nm, residuals)

    def shifted(self, pol: Polarization, amount: float) -> "GeometricCorrections":
        """Copy with a constant added to every Δn of one polarization."""
        updates = {lab: value + amount for lab, value in self.values.items() if lab.pol is pol}
        values = dict(self.values)
        values.update(updates)
        return GeometricCorrections(values, self.window_nm, dict(self.residuals))

    def to_dict(self) -> dict:
        """Convert to the corrections document layout."""
        return {
            "schema_version": CORRECTIONS_SCHEMA_VERSION,
            "kind": "geometric_corrections",
            "generator": f"modemix {__version__}",
            "window_nm": [self.window_nm[0], self.window_nm[1]],
            "entries": [
                {
                    "label": str(label),
                    "delta_n": self.values[label],
                    "residual": self.residual(label),
                }
                for label in self.labels()
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GeometricCorrections":
        """Create corrections from a parsed document."""
        version = data.get("schema_version")
        if version != CORRECTIONS_SCHEMA_VERSION:
            raise ConfigError(f"Unsupported corrections schema version {version!r}")
        try:
            lo, hi = data["window_nm"]
            values: dict[ModeLabel, float] = {}
            residuals: dict[ModeLabel, float] = {}
            for entry in data["entries"]:
                label = ModeLabel.parse(entry["label"])
                values[label] = float(entry["delta_n"])
                residuals[label] = float(entry.get("residual", 0.0))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ConfigError(f"Malformed corrections document: {exc!r}") from None
        return cls(values, (float(lo), float(hi)), residuals)


class CorrectionsIndexProvider:
    """Model backend: n_eff(λ) = n_bulk(λ, axis(pol)) + Δn(label)."""

    def __init__(
        self,
        material: SellmeierModel,
        corrections: GeometricCorrections,
        axes: AxisMapping | None = None,
    ) -> None:
        self.material = material
        self.corrections = corrections
        self.axes = axes or AxisMapping.default()
        lo, hi = corrections.window_nm
        for pol in Polarization:
            if pol is Polarization.S:
                continue
            if not np.all(self.material.in_range(self.axes.axis_for(pol), np.array([lo, hi]))):
                raise ValidationError(
                    f"Corrections window [{lo}, {hi}] nm exceeds the material range of "
                    f"{pol.value} (axis {self.axes.axis_for(pol).value})"
                )

    def bulk_index(self, pol: Polarization, wavelength_nm: ArrayLike) -> ArrayLike:
        return refractive_index(self.material, self.axes.axis_for(pol), wavelength_nm)

    def effective_index(self, label: ModeLabel, wavelength_nm: ArrayLike) -> ArrayLike:
        delta = self.corrections.delta(label)
        return self.bulk_index(label.pol, wavelength_nm) + delta

    def in_range(self, pol: Polarization, wavelength_nm: ArrayLike) -> np.ndarray:
        return self.material.in_range(self.axes.axis_for(pol), wavelength_nm)

    def with_corrections(self, corrections: GeometricCorrections) -> "CorrectionsIndexProvider":
        return CorrectionsIndexProvider(self.material, corrections, self.axes)


def solve_at(
    spec: WaveguideSpec,
    material: SellmeierModel,
    axes: AxisMapping,
    pol: Polarization,
    wavelength_nm: float,
    settings: SolverSettings,
    count: int | None = None,
) -> list[ModeField]:
    """Build the index grid for a polarization and solve it."""
    grid = index_profile(
        spec,
        material,
        axes.axis_for(pol),
        wavelength_nm,
        subpixel=settings.subpixel,
        samples_per_cell=settings.samples_per_cell,
        cell_centered=True,
    )
    return solve_modes(grid, pol, count or settings.mode_count, axes=axes, settings=settings)


class SolverIndexProvider:
    """Numeric backend: n_eff from a waveguide solve at each wavelength.

    Wavelengths are rounded to ``CACHE_DIGITS`` decimals for lookup. Effective
    indices are kept per (label, wavelength) and full solves per
    (polarization, wavelength), each in a least-recently-used cache guarded by
    a lock so one provider can be shared between threads.
    """

    def __init__(
        self,
        spec: WaveguideSpec,
        material: SellmeierModel,
        axes: AxisMapping | None = None,
        settings: SolverSettings | None = None,
        cache_size: int = INDEX_CACHE_SIZE,
        solve_cache_size: int = SOLVE_CACHE_SIZE,
    ) -> None:
        if cache_size < 1 or solve_cache_size < 1:
            raise ValidationError(
                f"Cache sizes must be at least 1, got {cache_size} and {solve_cache_size}"
            )
        self.spec = spec
        self.material = material
        self.axes = axes or AxisMapping.default()
        self.settings = settings or SolverSettings.default()
        self.cache_size = cache_size
        self.solve_cache_size = solve_cache_size
        self._indices: OrderedDict[tuple[ModeLabel, float], float] = OrderedDict()
        self._solves: OrderedDict[tuple[Polarization, float], dict[ModeLabel, ModeField]] = (
            OrderedDict()
        )
        self._lock = threading.Lock()

    @property
    def cached_indices(self) -> int:
        with self._lock:
            return len(self._indices)

    @property
    def cached_solves(self) -> int:
        with self._lock:
            return len(self._solves)

    def modes_at(self, pol: Polarization, wavelength_nm: float) -> dict[ModeLabel, ModeField]:
        key = (pol, round(float(wavelength_nm), CACHE_DIGITS))
        with self._lock:
            cached = self._solves.get(key)
            if cached is not None:
                self._solves.move_to_end(key)
                return cached
        modes = solve_at(self.spec, self.material, self.axes, pol, key[1], self.settings)
        solved = {mode.label: mode for mode in modes}
        with self._lock:
            solved = self._solves.setdefault(key, solved)
            self._solves.move_to_end(key)
            while len(self._solves) > self.solve_cache_size:
                self._solves.popitem(last=False)
            for label, mode in solved.items():
                self._remember((label, key[1]), mode.n_eff)
        return solved

    def _remember(self, key: tuple[ModeLabel, float], n_eff: float) -> None:
        self._indices[key] = n_eff
        self._indices.move_to_end(key)
        while len(self._indices) > self.cache_size:
            self._indices.popitem(last=False)

    def bulk_index(self, pol: Polarization, wavelength_nm: ArrayLike) -> ArrayLike:
        return refractive_index(self.material, self.axes.axis_for(pol), wavelength_nm)

    def _single(self, label: ModeLabel, wavelength_nm: float) -> float:
        key = (label, round(wavelength_nm, CACHE_DIGITS))
        with self._lock:
            cached = self._indices.get(key)
            if cached is not None:
                self._indices.move_to_end(key)
                return cached
        modes = self.modes_at(label.pol, wavelength_nm)
        try:
            return modes[label].n_eff
        except KeyError:
            found = ", ".join(str(lab) for lab in modes) or "none"
            raise ModeTrackingError(
                f"Mode {label} not found among solved modes at {wavelength_nm} nm (found: {found})"
            ) from None

    def effective_index(self, label: ModeLabel, wavelength_nm: ArrayLike) -> ArrayLike:
        if np.ndim(wavelength_nm) == 0:
            return self._single(label, float(wavelength_nm))
        wl = np.asarray(wavelength_nm, dtype=float)
        unique = {value: self._single(label, value) for value in np.unique(wl).tolist()}
        return np.vectorize(unique.__getitem__, otypes=[float])(wl)

    def in_range(self, pol: Polarization, wavelength_nm: ArrayLike) -> np.ndarray:
        return self.material.in_range(self.axes.axis_for(pol), wavelength_nm)


def effective_index(
    provider: IndexProvider, label: ModeLabel, wavelength_nm: ArrayLike
) -> ArrayLike:
    """n_eff of a labelled mode from either backend."""
    return provider.effective_index(label, wavelength_nm)


def _track(
    label: ModeLabel, wavelengths: Sequence[float], solved: Sequence[list[ModeField]]
) -> list[ModeField]:
    track: list[ModeField] = []
    for wavelength, modes in zip(wavelengths, solved):
        chosen = None
        if track:
            previous = track[-1]
            overlaps = [abs(inner_product(previous, mode)) for mode in modes]
            if overlaps and max(overlaps) >= TRACKING_OVERLAP_THRESHOLD:
                chosen = modes[int(np.argmax(overlaps))]
        if chosen is None:
            chosen = next((mode for mode in modes if mode.label == label), None)
        if chosen is None:
            raise ModeTrackingError(f"Mode {label} lost at {wavelength} nm (cutoff or mixing)")
        track.append(chosen)
    return track


def extract_corrections(
    spec: WaveguideSpec,
    material: SellmeierModel,
    labels: Iterable[ModeLabel],
    wavelengths_nm: Sequence[float],
    axes: AxisMapping | None = None,
    settings: SolverSettings | None = None,
) -> GeometricCorrections:
    """Fit a constant Δn per label to repeated solves over a wavelength grid.

    Args:
        spec: Waveguide specification.
        material: Bulk dispersion.
        labels: Modes to extract.
        wavelengths_nm: Fundamental wavelength grid (nm), solved in parallel;
            S modes are solved at half of each value.
        axes: Axis mapping.
        settings: Solver settings; ``workers`` sets the thread count.

    Returns:
        Corrections with Δn = mean(n_eff − n_bulk) and the max deviation from it.
    """
    axes = axes or AxisMapping.default()
    settings = settings or SolverSettings.default()
    wavelengths = [float(value) for value in wavelengths_nm]
    if not wavelengths:
        raise ValidationError("Wavelength grid is empty")
    wanted = sorted(set(labels), key=ModeLabel.sort_key)
    values: dict[ModeLabel, float] = {}
    residuals: dict[ModeLabel, float] = {}

    for pol in Polarization:
        pol_labels = [label for label in wanted if label.pol is pol]
        if not pol_labels:
            continue
        count = max(settings.mode_count, len(pol_labels))
        # S fields run at the sum frequency of a degenerate pair
        at = [wl / 2.0 if pol is Polarization.S else wl for wl in wavelengths]
        with ThreadPoolExecutor(max_workers=settings.workers) as pool:
            solved = list(
                pool.map(
                    lambda wl, p=pol: solve_at(spec, material, axes, p, wl, settings, count),
                    at,
                )
            )
        bulk = np.asarray(refractive_index(material, axes.axis_for(pol), np.array(at)))
        for label in pol_labels:
            track = _track(label, at, solved)
            excess = np.array([mode.n_eff for mode in track]) - bulk
            delta = float(excess.mean())
            values[label] = delta
            residuals[label] = float(np.max(np.abs(excess - delta)))
            logger.info(
                "Extracted %s: delta_n=%.6g, residual=%.3g", label, delta, residuals[label]
            )

    for pol in Polarization:
        fundamental = ModeLabel(0, 0, pol)
        if fundamental not in values:
            continue
        weaker = [
            lab
            for lab, v in values.items()
            if lab.pol is pol and lab != fundamental and v >= values[fundamental]
        ]
        if weaker:
            logger.warning(
                "Higher-order %s modes %s are not less confined than %s",
                pol.value,
                ", ".join(str(lab) for lab in weaker),
                fundamental,
            )

    return GeometricCorrections(values, (min(wavelengths), max(wavelengths)), residuals)
