# mixedtraces/extension/operator.py

import logging
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from mixedtraces.errors import InconsistentInputs
from mixedtraces.reflection.pairing import ReflectionMap
from mixedtraces.whitney.cubes import DyadicCube

from .grid_function import CellKind, GridFunction
from .partition import PartitionOfUnity

logger = logging.getLogger(__name__)


def _summed_area(f: GridFunction) -> np.ndarray:
    """S[j, i] = Σ of interior values over rows < j and columns < i."""
    vals = np.where(f.mask == CellKind.INTERIOR, f.values, 0.0)
    table = np.zeros((vals.shape[0] + 1, vals.shape[1] + 1))
    table[1:, 1:] = vals.cumsum(axis=0).cumsum(axis=1)
    return table


def cube_means(f: GridFunction, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    """(1/|Q|)·∫_{Q∩Ω} f by midpoint quadrature, for many boxes at once.

    A cell belongs to Q when its center lies in the half-open box [lower, upper).
    Boxes narrower than a cell take the value of the cell holding their center.
    """
    lower = np.atleast_2d(lower)
    upper = np.atleast_2d(upper)
    grid = f.grid
    h = grid.h
    table = _summed_area(f)
    origin = np.array([grid.xmin, grid.ymin])
    limit = np.array([grid.nx, grid.ny])
    first = np.clip(np.ceil((lower - origin) / h - 0.5 - 1e-9).astype(np.int64), 0, limit)
    last = np.clip(np.ceil((upper - origin) / h - 0.5 - 1e-9).astype(np.int64), 0, limit)
    total = (
        table[last[:, 1], last[:, 0]]
        - table[first[:, 1], last[:, 0]]
        - table[last[:, 1], first[:, 0]]
        + table[first[:, 1], first[:, 0]]
    )
    area = np.prod(upper - lower, axis=1)
    means = total * h * h / area

    small = (upper - lower).min(axis=1) < h
    if small.any():
        center = (lower[small] + upper[small]) / 2
        cell = np.floor((center - origin) / h).astype(np.int64)
        inside = np.all((cell >= 0) & (cell < limit), axis=1)
        vals = np.zeros(int(small.sum()))
        c = cell[inside]
        interior = f.mask[c[:, 1], c[:, 0]] == CellKind.INTERIOR
        vals[np.flatnonzero(inside)[interior]] = f.values[c[interior, 1], c[interior, 0]]
        means[small] = vals
    return means


def zero_extend_cube(
    f: GridFunction,
    Q_star: Union[DyadicCube, Sequence[float]],
) -> float:
    """Mean over Q* of the zero extension of f: (1/|Q*|)·∫_{Q*∩Ω} f.

    Args:
        f: Grid function on Ω
        Q_star: A dyadic cube or bounds (xmin, ymin, xmax, ymax)

    Returns:
        The mean value
    """
    bounds = Q_star.bounds if isinstance(Q_star, DyadicCube) else tuple(Q_star)
    lower = np.array([bounds[:2]], dtype=float)
    upper = np.array([bounds[2:]], dtype=float)
    return float(cube_means(f, lower, upper)[0])


def extend(f: GridFunction, rmap: ReflectionMap, pu: PartitionOfUnity) -> GridFunction:
    """E_D f: f on Ω, 0 on both collars, Σ_j (E_{Q_j*} f)_{Q_j*}·ψ_j(x) outside.

    Unpaired exterior cubes contribute nothing.

    Args:
        f: Grid function on Ω, on the same discretization as the partition
        rmap: Reflection map
        pu: Partition of unity built from the same cube classes

    Returns:
        GridFunction on the whole grid window

    Raises:
        InconsistentInputs
    """
    if rmap.classes is not pu.classes:
        raise InconsistentInputs("reflection map and partition of unity come from different classifications")
    if f.disc is not pu.disc:
        raise InconsistentInputs("grid function and partition of unity live on different grids")

    classes = rmap.classes
    dec_o, dec_g = classes.dec_omega, classes.dec_gamma
    coeff = np.zeros(len(dec_o))
    paired = rmap.paired
    if len(paired):
        stars = rmap.partner[paired]
        coeff[paired] = cube_means(f, dec_g.lower[stars], dec_g.upper[stars])

    out = np.zeros(f.grid.size)
    interior = f.disc.interior
    out[interior] = f.flat[interior]
    out[pu.cells] = pu.matrix @ coeff
    logger.debug("Extended %s: %d reflected means, %d exterior cells", f.name, len(paired), len(pu.cells))
    return GridFunction(f.disc, out, name=f"E_D {f.name}")


@dataclass
class SupportSeparation:
    """dist(supp f, D) against dist(supp E_D f, D), measured at cell centers."""

    rho: float
    rho_extended: float

    @property
    def ratio(self) -> float:
        """Measured C₁ = ρ / ρ_ext."""
        if self.rho_extended <= 0:
            return np.inf
        return self.rho / self.rho_extended

    @property
    def separated(self) -> bool:
        return self.rho_extended > 0


def support_separation(f: GridFunction, extended: GridFunction) -> SupportSeparation:
    dist_d = f.disc.dist_d
    supp = f.support()
    ext_supp = extended.support()
    rho = float(dist_d[supp].min()) if len(supp) else np.inf
    rho_ext = float(dist_d[ext_supp].min()) if len(ext_supp) else np.inf
    return SupportSeparation(rho=rho, rho_extended=rho_ext)
