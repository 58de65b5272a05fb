"""Full-vector finite-difference solver for transverse electric fields.

The unknowns are (Ex, Ey) on the grid nodes with zero field outside the box.
With a diagonal permittivity the transverse fields obey

    ∂y²Ex + ∂x[(1/εzz)∂x(εxx Ex)] + ∂x[(1/εzz)∂y(εyy Ey)] − ∂x∂y Ey
        + k0² εxx Ex = β² Ex
    ∂x²Ey + ∂y[(1/εzz)∂y(εyy Ey)] + ∂y[(1/εzz)∂x(εxx Ex)] − ∂y∂x Ex
        + k0² εyy Ey = β² Ey

which is discretized with face-averaged 1/εzz on the second-order terms and
central differences on the cross terms. Node p = i * ny + j, Ex first.
"""

import logging
import math
from dataclasses import replace

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import ArpackNoConvergence, eigs

from modemix.errors import SolverConvergenceError, ValidationError
from modemix.material import AxisMapping
from modemix.models import ModeLabel, Orientation, Polarization, SolverSettings
from modemix.modes.field import ModeField, classify_mode, normalize_fields
from modemix.waveguide import IndexGrid

logger = logging.getLogger(__name__)

START_VECTOR_SEED = 0


def vacuum_wavenumber(wavelength_nm: float) -> float:
    """k0 in rad/µm."""
    return 2.0 * math.pi / (wavelength_nm / 1000.0)


def assemble_operator(grid: IndexGrid) -> sparse.csr_matrix:
    """Sparse operator whose eigenvalues are β² (µm⁻²)."""
    nx, ny = grid.geometry.shape
    hx, hy = grid.geometry.hx_um, grid.geometry.hy_um
    k0 = vacuum_wavenumber(grid.wavelength_nm)
    eps = grid.diagonal_permittivity()
    exx = np.pad(eps.xx, 1, mode="edge")
    eyy = np.pad(eps.yy, 1, mode="edge")
    ezz = np.pad(eps.zz, 1, mode="edge")
    c = slice(1, -1)

    ezz_c = ezz[c, c]
    ezz_e = 0.5 * (ezz_c + ezz[2:, c])
    ezz_w = 0.5 * (ezz_c + ezz[:-2, c])
    ezz_n = 0.5 * (ezz_c + ezz[c, 2:])
    ezz_s = 0.5 * (ezz_c + ezz[c, :-2])

    n = nx * ny
    index = np.arange(n).reshape(nx, ny)
    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    vals: list[np.ndarray] = []

    def couple(coeff: "np.ndarray | float", di: int, dj: int, row: int, col: int) -> None:
        i0, i1 = max(0, -di), nx - max(0, di)
        j0, j1 = max(0, -dj), ny - max(0, dj)
        block = np.broadcast_to(coeff, (nx, ny))[i0:i1, j0:j1]
        rows.append(index[i0:i1, j0:j1].ravel() + row * n)
        cols.append(index[i0 + di : i1 + di, j0 + dj : j1 + dj].ravel() + col * n)
        vals.append(block.ravel())

    # Ex <- Ex
    couple(
        -exx[c, c] * (1.0 / ezz_e + 1.0 / ezz_w) / hx**2 - 2.0 / hy**2 + k0**2 * exx[c, c],
        0, 0, 0, 0,
    )
    couple(exx[2:, c] / (ezz_e * hx**2), 1, 0, 0, 0)
    couple(exx[:-2, c] / (ezz_w * hx**2), -1, 0, 0, 0)
    couple(1.0 / hy**2, 0, 1, 0, 0)
    couple(1.0 / hy**2, 0, -1, 0, 0)

    # Ey <- Ey
    couple(
        -eyy[c, c] * (1.0 / ezz_n + 1.0 / ezz_s) / hy**2 - 2.0 / hx**2 + k0**2 * eyy[c, c],
        0, 0, 1, 1,
    )
    couple(eyy[c, 2:] / (ezz_n * hy**2), 0, 1, 1, 1)
    couple(eyy[c, :-2] / (ezz_s * hy**2), 0, -1, 1, 1)
    couple(1.0 / hx**2, 1, 0, 1, 1)
    couple(1.0 / hx**2, -1, 0, 1, 1)

    q = 1.0 / (4.0 * hx * hy)
    # Ex <- Ey
    couple((eyy[2:, 2:] / ezz[2:, c] - 1.0) * q, 1, 1, 0, 1)
    couple(-(eyy[2:, :-2] / ezz[2:, c] - 1.0) * q, 1, -1, 0, 1)
    couple(-(eyy[:-2, 2:] / ezz[:-2, c] - 1.0) * q, -1, 1, 0, 1)
    couple((eyy[:-2, :-2] / ezz[:-2, c] - 1.0) * q, -1, -1, 0, 1)

    # Ey <- Ex
    couple((exx[2:, 2:] / ezz[c, 2:] - 1.0) * q, 1, 1, 1, 0)
    couple(-(exx[:-2, 2:] / ezz[c, 2:] - 1.0) * q, -1, 1, 1, 0)
    couple(-(exx[2:, :-2] / ezz[c, :-2] - 1.0) * q, 1, -1, 1, 0)
    couple((exx[:-2, :-2] / ezz[c, :-2] - 1.0) * q, -1, -1, 1, 0)

    operator = sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(2 * n, 2 * n),
    )
    return operator.tocsr()


def _upper_permittivity(grid: IndexGrid) -> float:
    eps = grid.diagonal_permittivity()
    return float(max(eps.xx.max(), eps.yy.max(), grid.max_index**2))


def solve_modes(
    grid: IndexGrid,
    pol: Polarization,
    count: int,
    axes: AxisMapping | None = None,
    settings: SolverSettings | None = None,
) -> list[ModeField]:
    """Compute guided modes of one polarization branch.

    Args:
        grid: Index grid built for the crystal axis of ``pol``.
        pol: Polarization slot; selects the branch by dominant field direction.
        count: Maximum number of modes to return.
        axes: Axis mapping deciding the S-field orientation.
        settings: Solver settings.

    Returns:
        Up to ``count`` normalized, labelled modes sorted by decreasing n_eff.
        An empty list means the grid guides nothing on this branch.
    """
    if count < 1:
        raise ValidationError(f"Mode count must be at least 1, got {count}")
    axes = axes or AxisMapping.default()
    settings = settings or SolverSettings.default()
    orientation = axes.orientation_for(pol)

    operator = assemble_operator(grid)
    size = operator.shape[0]
    n = size // 2
    k0 = vacuum_wavenumber(grid.wavelength_nm)
    sigma = k0**2 * _upper_permittivity(grid)
    nev = min(2 * count + settings.extra_vectors, size - 2)
    start = np.random.default_rng(START_VECTOR_SEED).standard_normal(size)
    logger.debug(
        "Solving %s modes at %.3f nm: %d unknowns, shift %.6g, %d eigenpairs",
        pol.value,
        grid.wavelength_nm,
        size,
        sigma,
        nev,
    )
    try:
        values, vectors = eigs(
            operator,
            k=nev,
            sigma=sigma,
            which="LM",
            v0=start,
            maxiter=settings.max_iterations,
            tol=0,
        )
    except ArpackNoConvergence as exc:
        raise SolverConvergenceError(
            f"Eigensolver did not converge at {grid.wavelength_nm} nm: "
            f"{len(exc.eigenvalues)} of {nev} eigenpairs after "
            f"{settings.max_iterations or 'default'} iterations"
        ) from exc

    nx, ny = grid.geometry.shape
    candidates: list[ModeField] = []
    for k in np.argsort(-values.real):
        beta_sq = float(values[k].real)
        if beta_sq <= 0:
            continue
        n_eff = math.sqrt(beta_sq) / k0
        if n_eff <= grid.bulk_index:
            continue
        vec = vectors[:, k]
        # ‖A v − β² v‖ / ‖v‖ in µm⁻²
        residual = float(
            np.linalg.norm(operator @ vec - values[k] * vec) / np.linalg.norm(vec)
        )
        anchor = vec[np.argmax(np.abs(vec))]
        real = (vec * np.conj(anchor) / abs(anchor)).real
        ex = real[:n].reshape(nx, ny)
        ey = real[n:].reshape(nx, ny)
        dominant, minor = (ex, ey) if orientation is Orientation.HORIZONTAL else (ey, ex)
        if np.sum(dominant**2) < np.sum(minor**2):
            continue
        if residual > settings.residual_tolerance:
            raise SolverConvergenceError(
                f"Mode at n_eff={n_eff:.8f} ({grid.wavelength_nm} nm) has residual "
                f"{residual:.3e} above tolerance {settings.residual_tolerance:.1e}"
            )
        dominant, minor = normalize_fields(dominant, minor, grid.geometry)
        dominant.setflags(write=False)
        minor.setflags(write=False)
        mode = ModeField(
            label=ModeLabel(0, 0, pol),
            wavelength_nm=grid.wavelength_nm,
            n_eff=n_eff,
            geometry=grid.geometry,
            dominant=dominant,
            minor=minor,
            orientation=orientation,
            residual=residual,
        )
        candidates.append(replace(mode, label=classify_mode(mode)))

    modes: list[ModeField] = []
    seen: set[ModeLabel] = set()
    for mode in candidates:
        if mode.label in seen:
            logger.warning(
                "Dropping %s mode at n_eff=%.8f: label %s already taken by a higher mode",
                pol.value,
                mode.n_eff,
                mode.label,
            )
            continue
        if mode.dominant_fraction < settings.dominant_fraction_warning:
            logger.warning(
                "Mode %s at %.2f nm carries only %.1f%% of its energy in the dominant component",
                mode.label,
                mode.wavelength_nm,
                100 * mode.dominant_fraction,
            )
        seen.add(mode.label)
        modes.append(mode)
        if len(modes) == count:
            break

    if not modes:
        logger.warning(
            "No guided %s modes at %.2f nm (bulk index %.6f)",
            pol.value,
            grid.wavelength_nm,
            grid.bulk_index,
        )
    else:
        logger.info(
            "Found %d guided %s modes at %.2f nm: %s",
            len(modes),
            pol.value,
            grid.wavelength_nm,
            ", ".join(f"{m.label}={m.n_eff:.6f}" for m in modes),
        )
    return modes
