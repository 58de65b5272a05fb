"""Configuration models."""

import logging
import math
from dataclasses import dataclass, field, fields
from enum import Enum
from typing import Any, Optional

from modemix.errors import ConfigError
from modemix.models.labels import Triplet

logger = logging.getLogger(__name__)

CRYSTAL_AXES = ("x", "y", "z")


class LateralShape(Enum):
    """Lateral index profile g(x)."""

    STEP = "step"
    SMOOTH = "smooth"
    UNIFORM = "uniform"


class DepthShape(Enum):
    """Depth index profile h(y)."""

    ERFC = "erfc"
    STEP = "step"


def _check_keys(cls: type, data: dict) -> None:
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"Unknown keys for {cls.__name__}: {', '.join(unknown)}")


def _is_multiple(value: float, step: float) -> bool:
    ratio = value / step
    return abs(ratio - round(ratio)) <= 1e-9 * max(1.0, abs(ratio))


@dataclass
class WaveguideSpec:
    """Geometry and index contrast of an ion-exchanged channel waveguide.

    Lengths are in µm except ``length_mm``. The computational box spans
    x in [-half_width_um, half_width_um] and y in [-superstrate_um,
    depth_extent_um]; y < 0 is air.
    """

    width_um: float = 4.0
    depth_um: float = 6.0
    index_increase: dict[str, float] = field(
        default_factory=lambda: {"x": 0.006, "y": 0.006, "z": 0.010}
    )
    lateral_shape: LateralShape = LateralShape.STEP
    edge_scale_um: float = 0.5
    depth_shape: DepthShape = DepthShape.ERFC
    poling_period_um: float = 9.3
    length_mm: float = 4.8
    half_width_um: float = 8.0
    depth_extent_um: float = 18.0
    superstrate_um: float = 2.0
    step_x_um: float = 0.1
    step_y_um: float = 0.1

    @classmethod
    def default(cls) -> "WaveguideSpec":
        """Create the default waveguide specification."""
        return cls()

    def delta_n(self, axis: str) -> float:
        """Surface index increase for a crystal axis."""
        try:
            return self.index_increase[axis]
        except KeyError:
            raise ConfigError(f"No index increase configured for axis {axis!r}") from None

    def validate(self) -> None:
        """Validate geometry values."""
        positive = {
            "Width": self.width_um,
            "Depth": self.depth_um,
            "Poling period": self.poling_period_um,
            "Length": self.length_mm,
            "Box half width": self.half_width_um,
            "Box depth": self.depth_extent_um,
            "Grid step x": self.step_x_um,
            "Grid step y": self.step_y_um,
        }
        for name, value in positive.items():
            if not (value > 0 and math.isfinite(value)):
                raise ConfigError(f"{name} must be positive, got {value}")
        if self.superstrate_um < 0:
            raise ConfigError(
                f"Superstrate thickness must be non-negative, got {self.superstrate_um}"
            )
        if self.lateral_shape is LateralShape.SMOOTH and self.edge_scale_um <= 0:
            raise ConfigError(f"Edge scale must be positive, got {self.edge_scale_um}")
        for axis in CRYSTAL_AXES:
            value = self.index_increase.get(axis)
            if value is None:
                raise ConfigError(f"Index increase missing for axis {axis!r}")
            if not (value >= 0 and math.isfinite(value)):
                raise ConfigError(f"Index increase for axis {axis!r} must be >= 0, got {value}")
        extra = sorted(set(self.index_increase) - set(CRYSTAL_AXES))
        if extra:
            raise ConfigError(f"Unknown crystal axes in index increase: {', '.join(extra)}")
        grid_checks = (
            ("Box half width", self.half_width_um, self.step_x_um),
            ("Box depth", self.depth_extent_um, self.step_y_um),
            ("Superstrate thickness", self.superstrate_um, self.step_y_um),
        )
        for name, length, step in grid_checks:
            if not _is_multiple(length, step):
                raise ConfigError(
                    f"{name} {length} µm is not a multiple of the grid step {step} µm"
                )
        if self.half_width_um < self.width_um:
            logger.warning(
                "Box half width %.3g µm is smaller than the guide width %.3g µm",
                self.half_width_um,
                self.width_um,
            )
        if self.depth_extent_um < 3 * self.depth_um:
            logger.warning(
                "Box depth %.3g µm is less than three exchange depths (%.3g µm)",
                self.depth_extent_um,
                3 * self.depth_um,
            )

    def to_dict(self) -> dict:
        """Convert to a plain dictionary (configuration layout)."""
        return {
            "width_um": self.width_um,
            "depth_um": self.depth_um,
            "index_increase": dict(self.index_increase),
            "lateral_shape": self.lateral_shape.value,
            "edge_scale_um": self.edge_scale_um,
            "depth_shape": self.depth_shape.value,
            "poling_period_um": self.poling_period_um,
            "length_mm": self.length_mm,
            "half_width_um": self.half_width_um,
            "depth_extent_um": self.depth_extent_um,
            "superstrate_um": self.superstrate_um,
            "step_x_um": self.step_x_um,
            "step_y_um": self.step_y_um,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "WaveguideSpec":
        """Create a spec from a configuration table, filling defaults."""
        _check_keys(cls, data)
        values: dict[str, Any] = dict(data)
        try:
            if "lateral_shape" in values:
                values["lateral_shape"] = LateralShape(values["lateral_shape"])
            if "depth_shape" in values:
                values["depth_shape"] = DepthShape(values["depth_shape"])
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if "index_increase" in values:
            merged = cls().index_increase
            merged.update({str(k): float(v) for k, v in values["index_increase"].items()})
            values["index_increase"] = merged
        spec = cls(**values)
        spec.validate()
        return spec


@dataclass
class SolverSettings:
    """Settings of the finite-difference eigensolver."""

    mode_count: int = 6
    residual_tolerance: float = 1e-9
    max_iterations: Optional[int] = None
    extra_vectors: int = 2
    subpixel: bool = True
    samples_per_cell: int = 4
    dominant_fraction_warning: float = 0.9
    workers: int = 1

    @classmethod
    def default(cls) -> "SolverSettings":
        """Create default solver settings."""
        return cls()

    def validate(self) -> None:
        """Validate solver settings."""
        if self.mode_count < 1:
            raise ConfigError("Mode count must be at least 1")
        if not self.residual_tolerance > 0:
            raise ConfigError("Residual tolerance must be positive")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ConfigError("Max iterations must be at least 1")
        if self.extra_vectors < 0:
            raise ConfigError("Extra vectors must be non-negative")
        if self.samples_per_cell < 1:
            raise ConfigError("Samples per cell must be at least 1")
        if self.workers < 1:
            raise ConfigError("Workers must be at least 1")

    @classmethod
    def from_dict(cls, data: dict) -> "SolverSettings":
        _check_keys(cls, data)
        settings = cls(**data)
        settings.validate()
        return settings


@dataclass
class GaugeSettings:
    """Gauge convention for geometric corrections and identification."""

    anchor: str = "00V+00H>00S"
    anchor_wavelength_nm: float = 799.6
    reference_correction: float = 0.0
    calibrate_period: bool = True
    flag_threshold_nm: float = 0.2
    corrections: str = "default"

    @classmethod
    def default(cls) -> "GaugeSettings":
        return cls()

    @property
    def anchor_triplet(self) -> Triplet:
        return Triplet.parse(self.anchor)

    def validate(self) -> None:
        """Validate gauge settings."""
        Triplet.parse(self.anchor)
        if not self.anchor_wavelength_nm > 0:
            raise ConfigError("Anchor wavelength must be positive")
        if not self.flag_threshold_nm > 0:
            raise ConfigError("Flag threshold must be positive")
        if not math.isfinite(self.reference_correction):
            raise ConfigError("Reference correction must be finite")

    @classmethod
    def from_dict(cls, data: dict) -> "GaugeSettings":
        _check_keys(cls, data)
        settings = cls(**data)
        settings.validate()
        return settings


@dataclass
class PhaseMatchingSettings:
    """Search window and scan defaults for band computations."""

    search_min_nm: float = 760.0
    search_max_nm: float = 860.0
    search_samples: int = 401
    step_nm: float = 0.2
    filter_fwhm_nm: float = 0.0

    @classmethod
    def default(cls) -> "PhaseMatchingSettings":
        return cls()

    @property
    def search_window(self) -> tuple[float, float]:
        return (self.search_min_nm, self.search_max_nm)

    def validate(self) -> None:
        if not 0 < self.search_min_nm < self.search_max_nm:
            raise ConfigError(
                f"Search window [{self.search_min_nm}, {self.search_max_nm}] nm is empty"
            )
        if self.search_samples < 2:
            raise ConfigError("Search samples must be at least 2")
        if not self.step_nm > 0:
            raise ConfigError("Scan step must be positive")
        if self.filter_fwhm_nm < 0:
            raise ConfigError("Filter FWHM must be non-negative")

    @classmethod
    def from_dict(cls, data: dict) -> "PhaseMatchingSettings":
        _check_keys(cls, data)
        settings = cls(**data)
        settings.validate()
        return settings
