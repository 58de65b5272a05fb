"""Run configuration: one TOML document describing material, guide and conventions."""

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Any, Optional

from modemix._toml import read_toml
from modemix.dispersion import (
    CorrectionsIndexProvider,
    GeometricCorrections,
    IndexProvider,
    SolverIndexProvider,
)
from modemix.errors import ConfigError
from modemix.material import AxisMapping, SellmeierModel, load_material
from modemix.models import GaugeSettings, PhaseMatchingSettings, SolverSettings, WaveguideSpec
from modemix.spdc import PumpSpec

logger = logging.getLogger(__name__)

CONFIG_SCHEMA_VERSION = 1
DEFAULT_CONFIG = "default.toml"
DEFAULT_CORRECTIONS = "corrections_default.json"
SECTIONS = ("material", "axes", "waveguide", "solver", "gauge", "phase_matching", "pump")


class Backend(Enum):
    """Source of effective indices."""

    MODEL = "model"
    NUMERIC = "numeric"


@dataclass
class ProjectConfig:
    """A complete run configuration.

    Relative paths (material coefficients, corrections) are resolved against
    ``base_dir``, the directory of the loaded document.
    """

    material: str = "ktp"
    axes: AxisMapping = field(default_factory=AxisMapping.default)
    waveguide: WaveguideSpec = field(default_factory=WaveguideSpec.default)
    solver: SolverSettings = field(default_factory=SolverSettings.default)
    gauge: GaugeSettings = field(default_factory=GaugeSettings.default)
    phase_matching: PhaseMatchingSettings = field(default_factory=PhaseMatchingSettings.default)
    pump: PumpSpec = field(default_factory=PumpSpec.default)
    base_dir: Optional[Path] = None

    @classmethod
    def default(cls) -> "ProjectConfig":
        """The bundled default configuration."""
        return load_config()

    def validate(self) -> None:
        """Validate every section."""
        self.waveguide.validate()
        self.solver.validate()
        self.gauge.validate()
        self.phase_matching.validate()
        self.pump.validate()

    def to_dict(self) -> dict:
        """Convert to the configuration document layout."""
        waveguide = self.waveguide.to_dict()
        solver = {
            "mode_count": self.solver.mode_count,
            "residual_tolerance": self.solver.residual_tolerance,
            "extra_vectors": self.solver.extra_vectors,
            "subpixel": self.solver.subpixel,
            "samples_per_cell": self.solver.samples_per_cell,
            "dominant_fraction_warning": self.solver.dominant_fraction_warning,
            "workers": self.solver.workers,
        }
        if self.solver.max_iterations is not None:
            solver["max_iterations"] = self.solver.max_iterations
        return {
            "schema_version": CONFIG_SCHEMA_VERSION,
            "material": {"file": self.material},
            "axes": self.axes.to_dict(),
            "waveguide": waveguide,
            "solver": solver,
            "gauge": {
                "anchor": self.gauge.anchor,
                "anchor_wavelength_nm": self.gauge.anchor_wavelength_nm,
                "reference_correction": self.gauge.reference_correction,
                "calibrate_period": self.gauge.calibrate_period,
                "flag_threshold_nm": self.gauge.flag_threshold_nm,
                "corrections": self.gauge.corrections,
            },
            "phase_matching": {
                "search_min_nm": self.phase_matching.search_min_nm,
                "search_max_nm": self.phase_matching.search_max_nm,
                "search_samples": self.phase_matching.search_samples,
                "step_nm": self.phase_matching.step_nm,
                "filter_fwhm_nm": self.phase_matching.filter_fwhm_nm,
            },
            "pump": self.pump.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict, base_dir: Optional[Path] = None) -> "ProjectConfig":
        """Create a configuration from a parsed document; missing sections take defaults."""
        version = data.get("schema_version", CONFIG_SCHEMA_VERSION)
        if version != CONFIG_SCHEMA_VERSION:
            raise ConfigError(f"Unsupported configuration schema version {version!r}")
        unknown = sorted(set(data) - set(SECTIONS) - {"schema_version"})
        if unknown:
            raise ConfigError(f"Unknown configuration section(s): {', '.join(unknown)}")
        material = _table(data, "material")
        extra = sorted(set(material) - {"file"})
        if extra:
            raise ConfigError(f"Unknown keys in [material]: {', '.join(extra)}")
        config = cls(
            material=str(material.get("file", "ktp")),
            axes=AxisMapping.from_dict(_table(data, "axes")),
            waveguide=WaveguideSpec.from_dict(_table(data, "waveguide")),
            solver=SolverSettings.from_dict(_table(data, "solver")),
            gauge=GaugeSettings.from_dict(_table(data, "gauge")),
            phase_matching=PhaseMatchingSettings.from_dict(_table(data, "phase_matching")),
            pump=PumpSpec.from_dict(_table(data, "pump")),
            base_dir=base_dir,
        )
        return config

    def resolve(self, value: str) -> Path:
        path = Path(value).expanduser()
        if not path.is_absolute() and self.base_dir is not None:
            path = self.base_dir / path
        return path

    def load_material(self) -> SellmeierModel:
        if self.material.endswith(".toml"):
            return load_material(self.resolve(self.material))
        return load_material(self.material)

    def load_corrections(self) -> GeometricCorrections:
        """Prior corrections named by ``gauge.corrections``."""
        if self.gauge.corrections == "default":
            bundled = resources.files("modemix.config") / DEFAULT_CORRECTIONS
            return GeometricCorrections.from_dict(json.loads(bundled.read_text(encoding="utf-8")))
        path = self.resolve(self.gauge.corrections)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"Corrections file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"Invalid JSON in {path}: {exc}") from None
        return GeometricCorrections.from_dict(data)

    def model_provider(self) -> CorrectionsIndexProvider:
        return CorrectionsIndexProvider(self.load_material(), self.load_corrections(), self.axes)

    def provider(self, backend: "Backend | str" = Backend.MODEL) -> IndexProvider:
        """Index backend selected by name."""
        try:
            backend = Backend(backend)
        except ValueError:
            raise ConfigError(f"Unknown backend {backend!r}, expected model or numeric") from None
        if backend is Backend.NUMERIC:
            return SolverIndexProvider(self.waveguide, self.load_material(), self.axes, self.solver)
        return self.model_provider()


def _table(data: dict, name: str) -> dict[str, Any]:
    value = data.get(name, {})
    if not isinstance(value, dict):
        raise ConfigError(f"[{name}] must be a table")
    return value


def load_config(path: "Path | str | None" = None) -> ProjectConfig:
    """Load a configuration file, or the bundled default when ``path`` is None."""
    if path is None:
        document = read_toml(resources.files("modemix.config") / DEFAULT_CONFIG)
        return ProjectConfig.from_dict(document)
    path = Path(path)
    config = ProjectConfig.from_dict(read_toml(path), base_dir=path.resolve().parent)
    logger.info("Loaded configuration %s", path)
    return config
