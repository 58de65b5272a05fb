"""Shared test doubles and scenario builders."""

from collections.abc import Mapping

import numpy as np

from modemix.errors import UnknownLabelError
from modemix.models import ModeLabel, Orientation, Polarization, Triplet
from modemix.modes import ModeField, normalize_fields
from modemix.waveguide import GridGeometry

# n = a + b * λ[µm] per polarization
BASE_COEFFICIENTS = {
    Polarization.V: (1.85, -0.05),
    Polarization.H: (1.76, -0.04),
    Polarization.S: (1.84, -0.06),
}
LABELS = ("00V", "01V", "10V", "02V", "00H", "01H", "10H", "02H", "00S", "01S", "02S", "10S")


class LinearIndexProvider:
    """Index backend with n_eff linear in wavelength; its band centers are closed-form."""

    def __init__(
        self,
        offsets: Mapping[str, float] | None = None,
        window_nm: tuple[float, float] = (300.0, 3000.0),
    ) -> None:
        offsets = offsets or {}
        self.coefficients: dict[ModeLabel, tuple[float, float]] = {}
        for text in LABELS:
            label = ModeLabel.parse(text)
            a, b = BASE_COEFFICIENTS[label.pol]
            self.coefficients[label] = (a + offsets.get(text, 0.0), b)
        self.window_nm = window_nm

    def effective_index(
        self, label: ModeLabel, wavelength_nm: "float | np.ndarray"
    ) -> "float | np.ndarray":
        try:
            a, b = self.coefficients[label]
        except KeyError:
            raise UnknownLabelError(f"No linear model for {label}") from None
        n = a + b * (np.asarray(wavelength_nm, dtype=float) / 1000.0)
        if np.ndim(n) == 0:
            return float(n)
        return n

    def in_range(self, pol: Polarization, wavelength_nm: "float | np.ndarray") -> np.ndarray:
        wl = np.asarray(wavelength_nm, dtype=float)
        lo, hi = self.window_nm
        return (wl >= lo) & (wl <= hi)


def linear_degenerate_root_nm(
    provider: LinearIndexProvider, triplet: Triplet, period_um: float
) -> float:
    """Closed-form degenerate root of a linear provider.

    On the diagonal 2 n_S(λ/2)/λ − n_V(λ)/λ − n_H(λ)/λ = 1/Λ reduces to
    (2 a_S − a_V − a_H)/λ + (b_S − b_V − b_H) = 1/Λ with λ in µm.
    """
    a_v, b_v = provider.coefficients[triplet.v]
    a_h, b_h = provider.coefficients[triplet.h]
    a_s, b_s = provider.coefficients[triplet.s]
    numerator = 2.0 * a_s - a_v - a_h
    return 1000.0 * numerator / (1.0 / period_um - (b_s - b_v - b_h))


GAUSSIAN_GRID = GridGeometry(x_offset=-40, y_offset=-40, hx_um=0.1, hy_um=0.1, nx=81, ny=81)


def gaussian_mode(
    label: str, width_um: float, odd_x: bool = False, geometry: GridGeometry = GAUSSIAN_GRID
) -> ModeField:
    """Power-normalized exp(−r²/w²) field, times x when ``odd_x``."""
    x = geometry.x[:, None]
    y = geometry.y[None, :]
    u = np.exp(-(x**2 + y**2) / width_um**2)
    if odd_x:
        u = x * u
    dominant, minor = normalize_fields(u, np.zeros_like(u), geometry)
    parsed = ModeLabel.parse(label)
    return ModeField(
        label=parsed,
        wavelength_nm=400.0 if parsed.pol is Polarization.S else 800.0,
        n_eff=1.8,
        geometry=geometry,
        dominant=dominant,
        minor=minor,
        orientation=Orientation.VERTICAL
        if parsed.pol is Polarization.V
        else Orientation.HORIZONTAL,
    )


def gaussian_modes(*specs: tuple[str, float]) -> dict[ModeLabel, ModeField]:
    """Fields by label from (label, width) pairs."""
    return {ModeLabel.parse(label): gaussian_mode(label, width) for label, width in specs}
