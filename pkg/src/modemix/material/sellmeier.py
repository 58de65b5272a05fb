"""Bulk dispersion of birefringent crystals from Sellmeier-type coefficients.

All wavelengths are vacuum wavelengths in nm at the API surface. The
coefficient formulas take λ in µm:

    resonant:  n² = A + Σ B / (λ² − C) − F λ²
    sellmeier: n² = A + Σ B λ² / (λ² − C) − F λ²
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Union, overload

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT

from modemix._toml import read_toml
from modemix.errors import ConfigError, ValidationError, WavelengthRangeError
from modemix.models.labels import Orientation, Polarization

MATERIAL_SCHEMA_VERSION = 1
FINITE_DIFFERENCE_STEP_NM = 0.01

ArrayLike = Union[float, np.ndarray]


class CrystalAxis(Enum):
    """Principal dielectric axes of the crystal."""

    X = "x"
    Y = "y"
    Z = "z"

    @classmethod
    def parse(cls, value: "CrystalAxis | str") -> "CrystalAxis":
        if isinstance(value, CrystalAxis):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValidationError(f"Unknown crystal axis {value!r}, expected x, y or z") from None


class SellmeierForm(Enum):
    """Algebraic form of the pole terms."""

    RESONANT = "resonant"
    SELLMEIER = "sellmeier"


@dataclass(frozen=True)
class AxisDispersion:
    """Coefficients of one principal axis."""

    axis: CrystalAxis
    a: float
    wavelength_min_nm: float
    wavelength_max_nm: float
    poles: tuple[tuple[float, float], ...] = ()
    ir: float = 0.0

    def __post_init__(self) -> None:
        if not self.wavelength_min_nm < self.wavelength_max_nm:
            raise ValidationError(
                f"Validity range of axis {self.axis.value} is empty: "
                f"[{self.wavelength_min_nm}, {self.wavelength_max_nm}] nm"
            )


@dataclass(frozen=True)
class SellmeierModel:
    """Per-axis dispersion of a crystal; immutable and safe to share."""

    name: str
    form: SellmeierForm
    axes: dict[CrystalAxis, AxisDispersion] = field(hash=False)
    reference_temperature_c: float | None = None

    def __post_init__(self) -> None:
        for axis, disp in self.axes.items():
            samples = np.linspace(disp.wavelength_min_nm, disp.wavelength_max_nm, 257)
            n_sq = _index_squared(self.form, disp, samples / 1000.0)
            if not np.all(np.isfinite(n_sq)) or np.any(n_sq <= 1.0):
                raise ValidationError(
                    f"Axis {axis.value} of {self.name} has n <= 1 or a pole inside "
                    f"[{disp.wavelength_min_nm}, {disp.wavelength_max_nm}] nm"
                )

    @classmethod
    def constant(
        cls, index: float, wavelength_range_nm: tuple[float, float] = (200.0, 5000.0)
    ) -> "SellmeierModel":
        """Dispersionless material with the same index on every axis."""
        lo, hi = wavelength_range_nm
        axes = {
            axis: AxisDispersion(axis, a=index * index, wavelength_min_nm=lo, wavelength_max_nm=hi)
            for axis in CrystalAxis
        }
        return cls(name=f"constant-{index}", form=SellmeierForm.RESONANT, axes=axes)

    def dispersion(self, axis: "CrystalAxis | str") -> AxisDispersion:
        key = CrystalAxis.parse(axis)
        try:
            return self.axes[key]
        except KeyError:
            raise ValidationError(
                f"Material {self.name} has no data for axis {key.value}"
            ) from None

    def validity_range(self, axis: "CrystalAxis | str") -> tuple[float, float]:
        disp = self.dispersion(axis)
        return (disp.wavelength_min_nm, disp.wavelength_max_nm)

    def in_range(self, axis: "CrystalAxis | str", wavelength_nm: ArrayLike) -> np.ndarray:
        """Boolean mask of wavelengths inside the closed validity window."""
        lo, hi = self.validity_range(axis)
        wl = np.asarray(wavelength_nm, dtype=float)
        return np.isfinite(wl) & (wl >= lo) & (wl <= hi)

    def to_dict(self) -> dict:
        """Convert to the coefficient-file layout."""
        return {
            "schema_version": MATERIAL_SCHEMA_VERSION,
            "name": self.name,
            "form": self.form.value,
            "reference_temperature_c": self.reference_temperature_c,
            "axis": [
                {
                    "id": disp.axis.value,
                    "a": disp.a,
                    "poles": [list(pole) for pole in disp.poles],
                    "ir": disp.ir,
                    "wavelength_range_nm": [disp.wavelength_min_nm, disp.wavelength_max_nm],
                }
                for disp in self.axes.values()
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SellmeierModel":
        """Create a model from a parsed coefficient file."""
        version = data.get("schema_version", MATERIAL_SCHEMA_VERSION)
        if version != MATERIAL_SCHEMA_VERSION:
            raise ConfigError(f"Unsupported material schema version {version}")
        try:
            form = SellmeierForm(data.get("form", "resonant"))
            axes = {}
            for record in data["axis"]:
                axis = CrystalAxis.parse(record["id"])
                lo, hi = record["wavelength_range_nm"]
                axes[axis] = AxisDispersion(
                    axis=axis,
                    a=float(record["a"]),
                    wavelength_min_nm=float(lo),
                    wavelength_max_nm=float(hi),
                    poles=tuple((float(b), float(c)) for b, c in record.get("poles", [])),
                    ir=float(record.get("ir", 0.0)),
                )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ConfigError(f"Malformed material data: {exc!r}") from None
        return cls(
            name=str(data.get("name", "unnamed")),
            form=form,
            axes=axes,
            reference_temperature_c=data.get("reference_temperature_c"),
        )


@dataclass(frozen=True)
class AxisMapping:
    """Which crystal axis each polarization slot is polarized along."""

    vertical: CrystalAxis = CrystalAxis.Z
    horizontal: CrystalAxis = CrystalAxis.Y
    sum_frequency: CrystalAxis = CrystalAxis.Y

    @classmethod
    def default(cls) -> "AxisMapping":
        """Type-II mapping of a z-cut, x-propagating guide."""
        return cls()

    def axis_for(self, pol: Polarization) -> CrystalAxis:
        return {
            Polarization.V: self.vertical,
            Polarization.H: self.horizontal,
            Polarization.S: self.sum_frequency,
        }[pol]

    def orientation_for(self, pol: Polarization) -> Orientation:
        """Dominant field direction of a polarization slot."""
        if pol is Polarization.V:
            return Orientation.VERTICAL
        if pol is Polarization.H:
            return Orientation.HORIZONTAL
        if self.sum_frequency == self.vertical:
            return Orientation.VERTICAL
        return Orientation.HORIZONTAL

    def to_dict(self) -> dict:
        return {
            "V": self.vertical.value,
            "H": self.horizontal.value,
            "S": self.sum_frequency.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AxisMapping":
        unknown = sorted(set(data) - {"V", "H", "S"})
        if unknown:
            raise ConfigError(f"Unknown axis mapping keys: {', '.join(unknown)}")
        default = cls()
        return cls(
            vertical=CrystalAxis.parse(data.get("V", default.vertical)),
            horizontal=CrystalAxis.parse(data.get("H", default.horizontal)),
            sum_frequency=CrystalAxis.parse(data.get("S", default.sum_frequency)),
        )


def _index_squared(
    form: SellmeierForm, disp: AxisDispersion, wavelength_um: np.ndarray
) -> np.ndarray:
    lam_sq = wavelength_um * wavelength_um
    n_sq = np.full_like(lam_sq, disp.a)
    for b, c in disp.poles:
        if form is SellmeierForm.RESONANT:
            n_sq = n_sq + b / (lam_sq - c)
        else:
            n_sq = n_sq + b * lam_sq / (lam_sq - c)
    if disp.ir:
        n_sq = n_sq - disp.ir * lam_sq
    return n_sq


def _index_squared_derivative(
    form: SellmeierForm, disp: AxisDispersion, wavelength_um: np.ndarray
) -> np.ndarray:
    """d(n²)/dλ in µm⁻¹."""
    lam_sq = wavelength_um * wavelength_um
    deriv = np.zeros_like(lam_sq)
    for b, c in disp.poles:
        denom = (lam_sq - c) ** 2
        if form is SellmeierForm.RESONANT:
            deriv = deriv - 2.0 * wavelength_um * b / denom
        else:
            deriv = deriv - 2.0 * wavelength_um * b * c / denom
    if disp.ir:
        deriv = deriv - 2.0 * disp.ir * wavelength_um
    return deriv


def _check_range(disp: AxisDispersion, wavelength_nm: np.ndarray, strict: bool) -> None:
    if wavelength_nm.size == 0:
        return
    if not np.all(np.isfinite(wavelength_nm)):
        raise WavelengthRangeError("Wavelength must be finite")
    lowest = float(np.min(wavelength_nm))
    highest = float(np.max(wavelength_nm))
    lo, hi = disp.wavelength_min_nm, disp.wavelength_max_nm
    below = lowest <= lo if strict else lowest < lo
    above = highest >= hi if strict else highest > hi
    where = "strictly inside" if strict else "inside"
    if below:
        raise WavelengthRangeError(
            f"Wavelength {lowest} nm is not {where} the lower bound {lo} nm "
            f"of axis {disp.axis.value}"
        )
    if above:
        raise WavelengthRangeError(
            f"Wavelength {highest} nm is not {where} the upper bound {hi} nm "
            f"of axis {disp.axis.value}"
        )


@overload
def _like_input(value: np.ndarray, template: float) -> float: ...


@overload
def _like_input(value: np.ndarray, template: np.ndarray) -> np.ndarray: ...


def _like_input(value: np.ndarray, template: ArrayLike) -> ArrayLike:
    if np.ndim(template) == 0:
        return float(value)
    return value


def refractive_index(
    model: SellmeierModel, axis: "CrystalAxis | str", wavelength_nm: ArrayLike
) -> ArrayLike:
    """Bulk refractive index along a crystal axis.

    Args:
        model: Coefficient set.
        axis: Crystal axis.
        wavelength_nm: Vacuum wavelength(s) in nm, inside the validity range.

    Returns:
        Index with the shape of ``wavelength_nm``.
    """
    disp = model.dispersion(axis)
    wl = np.asarray(wavelength_nm, dtype=float)
    _check_range(disp, wl, strict=False)
    n = np.sqrt(_index_squared(model.form, disp, wl / 1000.0))
    return _like_input(n, wavelength_nm)


def index_derivative(
    model: SellmeierModel, axis: "CrystalAxis | str", wavelength_nm: ArrayLike
) -> ArrayLike:
    """Analytic dn/dλ in nm⁻¹."""
    disp = model.dispersion(axis)
    wl = np.asarray(wavelength_nm, dtype=float)
    _check_range(disp, wl, strict=False)
    lam_um = wl / 1000.0
    n = np.sqrt(_index_squared(model.form, disp, lam_um))
    deriv = _index_squared_derivative(model.form, disp, lam_um) / (2.0 * n) / 1000.0
    return _like_input(deriv, wavelength_nm)


def group_index(
    model: SellmeierModel,
    axis: "CrystalAxis | str",
    wavelength_nm: ArrayLike,
    method: str = "analytic",
) -> ArrayLike:
    """Group index n − λ dn/dλ.

    Args:
        model: Coefficient set.
        axis: Crystal axis.
        wavelength_nm: Vacuum wavelength(s) in nm, strictly inside the validity range.
        method: ``"analytic"`` or ``"finite_difference"`` (central, 0.01 nm step).

    Returns:
        Group index with the shape of ``wavelength_nm``.
    """
    disp = model.dispersion(axis)
    wl = np.asarray(wavelength_nm, dtype=float)
    _check_range(disp, wl, strict=True)
    lam_um = wl / 1000.0
    n = np.sqrt(_index_squared(model.form, disp, lam_um))
    if method == "analytic":
        dn_dlam_um = _index_squared_derivative(model.form, disp, lam_um) / (2.0 * n)
        result = n - lam_um * dn_dlam_um
    elif method == "finite_difference":
        h = FINITE_DIFFERENCE_STEP_NM
        upper = np.sqrt(_index_squared(model.form, disp, (wl + h) / 1000.0))
        lower = np.sqrt(_index_squared(model.form, disp, (wl - h) / 1000.0))
        result = n - wl * (upper - lower) / (2.0 * h)
    else:
        raise ValidationError(f"Unknown derivative method {method!r}")
    return _like_input(result, wavelength_nm)


def angular_frequency(wavelength_nm: ArrayLike) -> ArrayLike:
    """Angular frequency ω = 2πc/λ in rad/s."""
    wl = np.asarray(wavelength_nm, dtype=float)
    omega = 2.0 * math.pi * SPEED_OF_LIGHT / (wl * 1e-9)
    return _like_input(omega, wavelength_nm)


def load_material(source: "str | Path" = "ktp") -> SellmeierModel:
    """Load a bundled coefficient set by name, or a coefficient TOML by path."""
    if isinstance(source, str) and not source.endswith(".toml"):
        bundled = resources.files("modemix.material") / "data" / f"{source.lower()}.toml"
        if not bundled.is_file():
            raise ConfigError(f"No bundled material named {source!r}")
        return SellmeierModel.from_dict(read_toml(bundled))
    return SellmeierModel.from_dict(read_toml(Path(source)))
