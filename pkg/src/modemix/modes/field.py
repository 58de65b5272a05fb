"""Guided mode fields, labelling and intensity images."""

import logging
from dataclasses import dataclass

import numpy as np

from modemix.errors import ClassificationError
from modemix.models import ModeLabel, Orientation
from modemix.waveguide import GridGeometry

logger = logging.getLogger(__name__)

NODE_THRESHOLD = 1e-3
WEAK_CUT_FRACTION = 0.1


@dataclass(frozen=True, eq=False)
class ModeField:
    """A guided mode on a grid.

    ``dominant`` and ``minor`` are real (nx, ny) arrays; for a horizontal
    orientation the dominant component is Ex, for a vertical one Ey.
    """

    label: ModeLabel
    wavelength_nm: float
    n_eff: float
    geometry: GridGeometry
    dominant: np.ndarray
    minor: np.ndarray
    orientation: Orientation
    normalized: bool = True
    residual: float = 0.0

    @property
    def ex(self) -> np.ndarray:
        return self.dominant if self.orientation is Orientation.HORIZONTAL else self.minor

    @property
    def ey(self) -> np.ndarray:
        return self.minor if self.orientation is Orientation.HORIZONTAL else self.dominant

    @property
    def power(self) -> float:
        """Discrete ∫(|dominant|² + |minor|²) dA."""
        total = np.sum(self.dominant**2) + np.sum(self.minor**2)
        return float(total * self.geometry.cell_area)

    @property
    def dominant_fraction(self) -> float:
        total = np.sum(self.dominant**2) + np.sum(self.minor**2)
        if total == 0:
            return 0.0
        return float(np.sum(self.dominant**2) / total)

    def is_normalized(self, tolerance: float = 1e-10) -> bool:
        return self.normalized and abs(self.power - 1.0) <= tolerance


def normalize_fields(
    dominant: np.ndarray, minor: np.ndarray, geometry: GridGeometry
) -> tuple[np.ndarray, np.ndarray]:
    """Scale to unit discrete power with the dominant peak positive."""
    power = (np.sum(dominant**2) + np.sum(minor**2)) * geometry.cell_area
    if not power > 0:
        raise ClassificationError("Cannot normalize an all-zero field")
    scale = 1.0 / np.sqrt(power)
    peak = np.unravel_index(np.argmax(np.abs(dominant)), dominant.shape)
    if dominant[peak] < 0:
        scale = -scale
    return dominant * scale, minor * scale


def _sign_changes(cut: np.ndarray, peak: float) -> int:
    significant = cut[np.abs(cut) > NODE_THRESHOLD * peak]
    if significant.size < 2:
        return 0
    signs = np.sign(significant)
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def classify_mode(mode: ModeField) -> ModeLabel:
    """Count nodes of the dominant component along x and y.

    The cuts run through the intensity centroid. A cut that lies on a nodal
    line (its largest amplitude under 10% of the peak) is replaced by the
    parallel cut through the field maximum.
    """
    u = mode.dominant
    peak = float(np.max(np.abs(u))) if u.size else 0.0
    if not (np.isfinite(peak) and peak > 0):
        raise ClassificationError(f"Mode {mode.label} has a degenerate (all-zero) field")
    intensity = u**2 + mode.minor**2
    weight = intensity.sum()
    xs, ys = mode.geometry.x, mode.geometry.y
    xc = float((intensity.sum(axis=1) * xs).sum() / weight)
    yc = float((intensity.sum(axis=0) * ys).sum() / weight)
    ic, jc = mode.geometry.node_index(xc, yc)
    ip, jp = np.unravel_index(np.argmax(np.abs(u)), u.shape)

    row = u[:, jc]
    if np.max(np.abs(row)) < WEAK_CUT_FRACTION * peak:
        row = u[:, jp]
    column = u[ic, :]
    if np.max(np.abs(column)) < WEAK_CUT_FRACTION * peak:
        column = u[ip, :]
    return ModeLabel(_sign_changes(row, peak), _sign_changes(column, peak), mode.label.pol)


def mode_intensity_image(mode: ModeField) -> np.ndarray:
    """|dominant|² + |minor|², peak-normalized to 1; shape (nx, ny)."""
    intensity = mode.dominant**2 + mode.minor**2
    peak = intensity.max()
    if peak == 0:
        return intensity
    return intensity / peak


def parity_defect(mode: ModeField) -> float:
    """Energy fraction of the dominant component violating its best x parity."""
    u = mode.dominant
    mirrored = u[::-1, :]
    even = 0.5 * (u + mirrored)
    odd = 0.5 * (u - mirrored)
    total = np.sum(u**2)
    if total == 0:
        return 0.0
    return float(min(np.sum(even**2), np.sum(odd**2)) / total)


def inner_product(a: ModeField, b: ModeField) -> float:
    """Discrete ∫(Ex_a Ex_b + Ey_a Ey_b) dA."""
    total = np.sum(a.ex * b.ex) + np.sum(a.ey * b.ey)
    return float(total * a.geometry.cell_area)
