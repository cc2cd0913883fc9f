# mixedtraces/extension/grid_function.py

import logging
from dataclasses import dataclass
from enum import IntEnum
from functools import cached_property
from typing import Callable, Optional, Union

import numpy as np
import pandas as pd
import shapely

from mixedtraces.dataflows.config import resolve
from mixedtraces.geometry.domain import Box, DomainModel

logger = logging.getLogger(__name__)

# Collar cells straddle the boundary: centers strictly within h/2 of D or Γ.
_COLLAR_SLACK = 1.0 - 1e-9


class CellKind(IntEnum):
    EXTERIOR = 0
    INTERIOR = 1
    D_COLLAR = 2
    GAMMA_COLLAR = 3


class FaceKind(IntEnum):
    OPEN = 0
    D_WALL = 1
    GAMMA_WALL = 2


@dataclass(frozen=True)
class GridWindow:
    """Uniform grid of nx × ny cells of side h with lower-left corner (xmin, ymin).

    Flat indices are row-major: index = iy * nx + ix.
    """

    xmin: float
    ymin: float
    h: float
    nx: int
    ny: int

    @property
    def xmax(self) -> float:
        return self.xmin + self.nx * self.h

    @property
    def ymax(self) -> float:
        return self.ymin + self.ny * self.h

    @property
    def shape(self):
        return (self.ny, self.nx)

    @property
    def size(self) -> int:
        return self.nx * self.ny

    @property
    def box(self) -> Box:
        return Box(self.xmin, self.ymin, self.xmax, self.ymax)

    @cached_property
    def centers(self) -> np.ndarray:
        xs = self.xmin + (np.arange(self.nx) + 0.5) * self.h
        ys = self.ymin + (np.arange(self.ny) + 0.5) * self.h
        gx, gy = np.meshgrid(xs, ys, indexing="xy")
        return np.stack([gx.ravel(), gy.ravel()], axis=1)


def grid_window(box: Box, h: float) -> GridWindow:
    """Smallest grid of side-h cells aligned to multiples of h covering `box`."""
    if not h > 0:
        raise ValueError(f"cell side must be positive, got {h}")
    i0 = int(np.floor(box.xmin / h + 1e-9))
    j0 = int(np.floor(box.ymin / h + 1e-9))
    i1 = int(np.ceil(box.xmax / h - 1e-9))
    j1 = int(np.ceil(box.ymax / h - 1e-9))
    return GridWindow(xmin=i0 * h, ymin=j0 * h, h=h, nx=i1 - i0, ny=j1 - j0)


@dataclass(eq=False)
class FaceTable:
    """Faces between horizontally or vertically adjacent cells with at least one
    interior cell. `a` is always an interior cell."""

    a: np.ndarray
    b: np.ndarray
    axis: np.ndarray
    kind: np.ndarray

    @property
    def open(self) -> np.ndarray:
        return self.kind == FaceKind.OPEN


@dataclass(eq=False)
class Discretization:
    """A domain sampled on a uniform grid: cell kinds, distances and faces."""

    domain: DomainModel
    grid: GridWindow

    @property
    def h(self) -> float:
        return self.grid.h

    @cached_property
    def centers(self) -> np.ndarray:
        return self.grid.centers

    @cached_property
    def interior(self) -> np.ndarray:
        return self.domain.contains(self.centers)

    @cached_property
    def dist_d(self) -> np.ndarray:
        return self.domain.distance(self.centers, "D")

    @cached_property
    def dist_gamma(self) -> np.ndarray:
        return self.domain.distance(self.centers, "gamma")

    @cached_property
    def kinds(self) -> np.ndarray:
        """Flat array of CellKind codes."""
        kinds = np.full(self.grid.size, CellKind.EXTERIOR, dtype=np.int8)
        kinds[self.interior] = CellKind.INTERIOR
        reach = self.h / 2 * _COLLAR_SLACK
        near_d = ~self.interior & (self.dist_d < reach)
        near_g = ~self.interior & (self.dist_gamma < reach)
        kinds[near_g & ~(near_d & (self.dist_d <= self.dist_gamma))] = CellKind.GAMMA_COLLAR
        kinds[near_d & ~(near_g & (self.dist_gamma < self.dist_d))] = CellKind.D_COLLAR
        return kinds

    @property
    def mask(self) -> np.ndarray:
        return self.kinds.reshape(self.grid.shape)

    def cells(self, kind: CellKind) -> np.ndarray:
        return np.flatnonzero(self.kinds == kind)

    @cached_property
    def faces(self) -> FaceTable:
        nx, ny = self.grid.nx, self.grid.ny
        idx = np.arange(self.grid.size).reshape(ny, nx)
        pairs = [
            (idx[:, :-1].ravel(), idx[:, 1:].ravel(), 0),
            (idx[:-1, :].ravel(), idx[1:, :].ravel(), 1),
        ]
        a_all, b_all, axis_all = [], [], []
        for a, b, axis in pairs:
            ia, ib = self.interior[a], self.interior[b]
            keep = ia | ib
            a, b, ia = a[keep], b[keep], ia[keep]
            # orient so that `a` is interior
            a, b = np.where(ia, a, b), np.where(ia, b, a)
            a_all.append(a)
            b_all.append(b)
            axis_all.append(np.full(len(a), axis, dtype=np.int8))
        a = np.concatenate(a_all)
        b = np.concatenate(b_all)
        axis = np.concatenate(axis_all)

        kind = np.full(len(a), FaceKind.OPEN, dtype=np.int8)
        both = self.interior[a] & self.interior[b]
        crossing = np.ones(len(a), dtype=bool)
        if both.any():
            segs = shapely.linestrings(
                np.stack([self.centers[a[both]], self.centers[b[both]]], axis=1)
            )
            crossing[both] = shapely.intersects(segs, self.domain.boundary)
        wall = crossing
        if wall.any():
            mid = (self.centers[a[wall]] + self.centers[b[wall]]) / 2
            dd = self.domain.distance(mid, "D")
            dg = self.domain.distance(mid, "gamma")
            kind[wall] = np.where(dd <= dg, FaceKind.D_WALL, FaceKind.GAMMA_WALL)
        return FaceTable(a=a, b=b, axis=axis, kind=kind)

    def zeros(self, name: str = "f") -> "GridFunction":
        return GridFunction(self, np.zeros(self.grid.shape), name=name)

    def function(self, values: np.ndarray, name: str = "f", masked: bool = True) -> "GridFunction":
        """Wrap cell values; `masked` zeroes everything off the interior cells."""
        values = np.array(values, dtype=float).reshape(self.grid.shape)
        if masked:
            values = np.where(self.mask == CellKind.INTERIOR, values, 0.0)
        return GridFunction(self, values, name=name)

    def sample(self, fn: Callable[[np.ndarray, np.ndarray], np.ndarray], name: str = "f") -> "GridFunction":
        """Evaluate fn(x, y) at interior cell centers; zero elsewhere."""
        c = self.centers
        return self.function(np.asarray(fn(c[:, 0], c[:, 1]), dtype=float), name=name)


def discretize(
    domain: DomainModel,
    h: float,
    window: Optional[Box] = None,
    margin: Optional[float] = None,
) -> Discretization:
    """Grid over `window`, or over the domain bounds grown by `margin`.

    Args:
        domain: The domain model
        h: Cell side
        window: Explicit box to cover; snapped outward to multiples of h
        margin: Margin around the domain bounds when no window is given

    Returns:
        Discretization
    """
    if window is None:
        margin = float(resolve("grid_margin", margin))
        window = domain.bounds.expanded(margin)
    disc = Discretization(domain, grid_window(window, h))
    logger.debug(
        "Discretized %s: h=%g, %d×%d cells, %d interior",
        domain.name,
        h,
        disc.grid.nx,
        disc.grid.ny,
        int(disc.interior.sum()),
    )
    return disc


@dataclass(eq=False)
class GridFunction:
    """Real samples at the cell centers of a discretization."""

    disc: Discretization
    values: np.ndarray
    name: str = "f"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).reshape(self.disc.grid.shape)

    @property
    def grid(self) -> GridWindow:
        return self.disc.grid

    @property
    def h(self) -> float:
        return self.disc.h

    @property
    def mask(self) -> np.ndarray:
        return self.disc.mask

    @property
    def flat(self) -> np.ndarray:
        return self.values.ravel()

    def with_values(self, values: np.ndarray, name: Optional[str] = None) -> "GridFunction":
        return GridFunction(self.disc, values, name=name or self.name)

    def _check(self, other: "GridFunction"):
        if other.disc is not self.disc:
            raise ValueError("grid functions live on different discretizations")

    def __add__(self, other: "GridFunction") -> "GridFunction":
        self._check(other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        self._check(other)
        return self.with_values(self.values - other.values)

    def __mul__(self, other: Union[float, "GridFunction"]) -> "GridFunction":
        if isinstance(other, GridFunction):
            self._check(other)
            return self.with_values(self.values * other.values)
        return self.with_values(float(other) * self.values)

    __rmul__ = __mul__

    def __neg__(self) -> "GridFunction":
        return self.with_values(-self.values)

    def support(self) -> np.ndarray:
        """Flat indices of cells with a nonzero value."""
        return np.flatnonzero(self.flat != 0.0)

    def to_frame(self) -> pd.DataFrame:
        c = self.disc.centers
        return pd.DataFrame({"x": c[:, 0], "y": c[:, 1], "value": self.flat, "mask": self.disc.kinds})
