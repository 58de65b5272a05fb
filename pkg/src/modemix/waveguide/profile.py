"""Transverse refractive-index distribution of the exchanged channel guide."""

import logging
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy.special import erf, erfc

from modemix.errors import ValidationError
from modemix.material import CrystalAxis, SellmeierModel, refractive_index
from modemix.models import DepthShape, LateralShape, WaveguideSpec

logger = logging.getLogger(__name__)

SUPERSTRATE_INDEX = 1.0


def _frozen(array: np.ndarray) -> np.ndarray:
    out = np.array(array, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class GridGeometry:
    """Uniform node grid; node k sits at (k + offset) * step.

    Integer offsets keep node coordinates exact multiples of the step, so a
    grid refined by two reproduces every coarse node coordinate bit-for-bit.
    A cell-centred grid shifts every node by half a step: node k sits at
    (k + offset + 1/2) * step and the multiples of the step become cell faces.
    """

    x_offset: int
    y_offset: int
    hx_um: float
    hy_um: float
    nx: int
    ny: int
    cell_centered: bool = False

    @classmethod
    def for_spec(cls, spec: WaveguideSpec, cell_centered: bool = False) -> "GridGeometry":
        """Grid covering [-X, X] x [-superstrate, Y] of a spec.

        Cell-centred, the guide edges and the surface lie on cell faces,
        midway between nodes.
        """
        half = round(spec.half_width_um / spec.step_x_um)
        air = round(spec.superstrate_um / spec.step_y_um)
        depth = round(spec.depth_extent_um / spec.step_y_um)
        return cls(
            x_offset=-half,
            y_offset=-air,
            hx_um=spec.step_x_um,
            hy_um=spec.step_y_um,
            nx=2 * half + (0 if cell_centered else 1),
            ny=air + depth + (0 if cell_centered else 1),
            cell_centered=cell_centered,
        )

    @property
    def x(self) -> np.ndarray:
        return (np.arange(self.nx) + self.x_offset + self._shift) * self.hx_um

    @property
    def y(self) -> np.ndarray:
        return (np.arange(self.ny) + self.y_offset + self._shift) * self.hy_um

    @property
    def _shift(self) -> float:
        return 0.5 if self.cell_centered else 0.0

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    @property
    def cell_area(self) -> float:
        return self.hx_um * self.hy_um

    def node_index(self, x_um: float, y_um: float) -> tuple[int, int]:
        """Index of the node nearest to a coordinate."""
        i = int(np.floor(x_um / self.hx_um - self._shift + 0.5)) - self.x_offset
        j = int(np.floor(y_um / self.hy_um - self._shift + 0.5)) - self.y_offset
        return (min(max(i, 0), self.nx - 1), min(max(j, 0), self.ny - 1))

    def to_dict(self) -> dict:
        return {
            "x_offset": self.x_offset,
            "y_offset": self.y_offset,
            "hx_um": self.hx_um,
            "hy_um": self.hy_um,
            "nx": self.nx,
            "ny": self.ny,
            "cell_centered": self.cell_centered,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GridGeometry":
        return cls(
            x_offset=int(data["x_offset"]),
            y_offset=int(data["y_offset"]),
            hx_um=float(data["hx_um"]),
            hy_um=float(data["hy_um"]),
            nx=int(data["nx"]),
            ny=int(data["ny"]),
            cell_centered=bool(data.get("cell_centered", False)),
        )


@dataclass(frozen=True)
class PermittivityTensor:
    """Cell-averaged diagonal permittivity on the nodes of a grid."""

    xx: np.ndarray
    yy: np.ndarray
    zz: np.ndarray


@dataclass(frozen=True, eq=False)
class IndexGrid:
    """Point-sampled index map n(x, y) for one crystal axis and wavelength.

    ``values`` has shape (nx, ny): first index x, second index y.
    """

    geometry: GridGeometry
    values: np.ndarray
    axis: CrystalAxis
    wavelength_nm: float
    bulk_index: float
    permittivity: Optional[PermittivityTensor] = None

    def __post_init__(self) -> None:
        if self.values.shape != self.geometry.shape:
            raise ValidationError(
                f"Index array shape {self.values.shape} does not match grid {self.geometry.shape}"
            )

    @property
    def max_index(self) -> float:
        return float(self.values.max())

    @property
    def min_index(self) -> float:
        return float(self.values.min())

    def diagonal_permittivity(self) -> PermittivityTensor:
        """Smoothed permittivity if available, else n² at the nodes."""
        if self.permittivity is not None:
            return self.permittivity
        eps = self.values**2
        return PermittivityTensor(xx=eps, yy=eps, zz=eps)


class ProfileRow(NamedTuple):
    x_um: float
    y_um: float
    n: float


def lateral_profile(spec: WaveguideSpec, x_um: np.ndarray) -> np.ndarray:
    """g(x) in [0, 1]."""
    half = spec.width_um / 2.0
    if spec.lateral_shape is LateralShape.UNIFORM:
        return np.ones_like(x_um, dtype=float)
    if spec.lateral_shape is LateralShape.STEP:
        return np.where(np.abs(x_um) <= half, 1.0, 0.0)
    s = spec.edge_scale_um
    return 0.5 * (erf((x_um + half) / s) - erf((x_um - half) / s))


def depth_profile(spec: WaveguideSpec, y_um: np.ndarray) -> np.ndarray:
    """h(y) for y >= 0; h(0) = 1."""
    if spec.depth_shape is DepthShape.STEP:
        return np.where(y_um < spec.depth_um, 1.0, 0.0)
    return erfc(y_um / spec.depth_um)


def _sample(
    spec: WaveguideSpec, bulk: float, delta: float, x_um: np.ndarray, y_um: np.ndarray
) -> np.ndarray:
    """n on the outer product of x and y samples, any leading shapes."""
    g = lateral_profile(spec, x_um)
    h = depth_profile(spec, np.maximum(y_um, 0.0))
    g = g.reshape(g.shape + (1,) * y_um.ndim)
    substrate = bulk + delta * g * h
    return np.where(y_um >= 0.0, substrate, SUPERSTRATE_INDEX)


def _smoothed_permittivity(
    spec: WaveguideSpec, geometry: GridGeometry, bulk: float, delta: float, samples: int
) -> PermittivityTensor:
    # sub-samples at the centres of an m x m partition of each node cell
    offsets = (np.arange(samples) + 0.5) / samples - 0.5
    xs = geometry.x[:, None] + offsets[None, :] * geometry.hx_um
    ys = geometry.y[:, None] + offsets[None, :] * geometry.hy_um
    eps = _sample(spec, bulk, delta, xs, ys) ** 2  # (nx, m, ny, m)
    inv = 1.0 / eps
    zz = eps.mean(axis=(1, 3))
    xx = (1.0 / inv.mean(axis=1)).mean(axis=2)
    yy = (1.0 / inv.mean(axis=3)).mean(axis=1)
    return PermittivityTensor(xx=_frozen(xx), yy=_frozen(yy), zz=_frozen(zz))


def index_profile(
    spec: WaveguideSpec,
    material: SellmeierModel,
    axis: "CrystalAxis | str",
    wavelength_nm: float,
    subpixel: bool = True,
    samples_per_cell: int = 4,
    cell_centered: bool = False,
) -> IndexGrid:
    """Build n(x, y) for one crystal axis at one wavelength.

    Args:
        spec: Waveguide geometry and index increase.
        material: Bulk dispersion of the substrate.
        axis: Crystal axis the field is polarized along.
        wavelength_nm: Vacuum wavelength in nm.
        subpixel: Attach a cell-averaged permittivity for the solver.
        samples_per_cell: Sub-samples per cell edge for the averaging.
        cell_centered: Place nodes at cell centres so every material
            interface falls midway between nodes (the solver layout).

    Returns:
        The index grid; node values are exact point samples of the profile.
    """
    spec.validate()
    crystal_axis = CrystalAxis.parse(axis)
    bulk = float(refractive_index(material, crystal_axis, wavelength_nm))
    delta = spec.delta_n(crystal_axis.value)
    geometry = GridGeometry.for_spec(spec, cell_centered)
    values = _sample(spec, bulk, delta, geometry.x, geometry.y)
    permittivity = None
    if subpixel:
        permittivity = _smoothed_permittivity(spec, geometry, bulk, delta, samples_per_cell)
    logger.debug(
        "Index grid %dx%d for axis %s at %.3f nm (bulk %.6f, delta %.4g)",
        geometry.nx,
        geometry.ny,
        crystal_axis.value,
        wavelength_nm,
        bulk,
        delta,
    )
    return IndexGrid(
        geometry=geometry,
        values=_frozen(values),
        axis=crystal_axis,
        wavelength_nm=float(wavelength_nm),
        bulk_index=bulk,
        permittivity=permittivity,
    )


def render_profile(grid: IndexGrid) -> list[ProfileRow]:
    """Row-per-node dump, x-major (all y for the first x, then the next x)."""
    xs = grid.geometry.x
    ys = grid.geometry.y
    return [
        ProfileRow(float(xs[i]), float(ys[j]), float(grid.values[i, j]))
        for i in range(grid.geometry.nx)
        for j in range(grid.geometry.ny)
    ]
