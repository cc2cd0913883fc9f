# mixedtraces/whitney/decomposition.py

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Optional

import numpy as np
import pandas as pd
import shapely
from scipy import sparse

from mixedtraces.dataflows.config import resolve
from mixedtraces.errors import EmptyClosedSet, WindowTooSmall
from mixedtraces.geometry.domain import Box

from .cubes import SQRT2, DyadicCube

logger = logging.getLogger(__name__)

_LEVEL_SHIFT = 42
_IX_SHIFT = 21


def cube_keys(level: np.ndarray, ix: np.ndarray, iy: np.ndarray) -> np.ndarray:
    """Pack (level, ix, iy) into sortable int64 keys in canonical order."""
    return (
        (np.asarray(level, dtype=np.int64) << _LEVEL_SHIFT)
        | (np.asarray(ix, dtype=np.int64) << _IX_SHIFT)
        | np.asarray(iy, dtype=np.int64)
    )


@dataclass(eq=False)
class WhitneyDecomposition:
    """Dyadic Whitney cubes of window ∖ F in canonical (level, ix, iy) order."""

    closed_set_id: str
    closed_set: object
    window: Box
    base_scale: float
    level: np.ndarray
    ix: np.ndarray
    iy: np.ndarray
    max_level: int
    truncated: bool = False
    collar: np.ndarray = field(default_factory=lambda: np.zeros((0, 2), dtype=np.int64))

    def __len__(self) -> int:
        return len(self.level)

    @property
    def min_level(self) -> int:
        return int(self.level.min()) if len(self) else 0

    @cached_property
    def side(self) -> np.ndarray:
        return self.base_scale * np.ldexp(1.0, -self.level)

    @cached_property
    def diam(self) -> np.ndarray:
        return self.side * SQRT2

    @cached_property
    def lower(self) -> np.ndarray:
        return np.stack(
            [self.window.xmin + self.ix * self.side, self.window.ymin + self.iy * self.side], axis=1
        )

    @cached_property
    def upper(self) -> np.ndarray:
        return self.lower + self.side[:, None]

    @cached_property
    def centers(self) -> np.ndarray:
        return self.lower + self.side[:, None] / 2

    @cached_property
    def keys(self) -> np.ndarray:
        return cube_keys(self.level, self.ix, self.iy)

    @cached_property
    def boxes(self) -> np.ndarray:
        return shapely.box(self.lower[:, 0], self.lower[:, 1], self.upper[:, 0], self.upper[:, 1])

    @cached_property
    def set_distance(self) -> np.ndarray:
        """dist(Q, F) for every cube."""
        return shapely.distance(self.boxes, self.closed_set)

    @cached_property
    def neighbor_graph(self) -> sparse.csr_matrix:
        """Symmetric adjacency of cubes whose closures intersect."""
        if len(self) == 0:
            return sparse.csr_matrix((0, 0), dtype=bool)
        tree = shapely.STRtree(self.boxes)
        left, right = tree.query(self.boxes, predicate="intersects")
        keep = left != right
        n = len(self)
        graph = sparse.coo_matrix(
            (np.ones(int(keep.sum()), dtype=bool), (left[keep], right[keep])), shape=(n, n)
        ).tocsr()
        graph.sort_indices()
        return graph

    def cube(self, i: int) -> DyadicCube:
        return DyadicCube(
            level=int(self.level[i]),
            ix=int(self.ix[i]),
            iy=int(self.iy[i]),
            side=float(self.side[i]),
            x0=float(self.lower[i, 0]),
            y0=float(self.lower[i, 1]),
        )

    def locate(self, points: np.ndarray) -> np.ndarray:
        """Index of a cube containing each point (half-open cells), -1 if none."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        found = np.full(len(pts), -1, dtype=np.int64)
        if len(self) == 0:
            return found
        for lvl in np.unique(self.level):
            side = self.base_scale * np.ldexp(1.0, -int(lvl))
            ix = np.floor((pts[:, 0] - self.window.xmin) / side).astype(np.int64)
            iy = np.floor((pts[:, 1] - self.window.ymin) / side).astype(np.int64)
            valid = (ix >= 0) & (iy >= 0) & (found < 0)
            keys = cube_keys(np.full(len(pts), lvl), np.where(valid, ix, 0), np.where(valid, iy, 0))
            pos = np.clip(np.searchsorted(self.keys, keys), 0, len(self) - 1)
            hit = valid & (self.keys[pos] == keys)
            found[hit] = pos[hit]
        return found

    @property
    def collar_area(self) -> float:
        side = self.base_scale * 2.0**-self.max_level
        return float(len(self.collar) * side * side)

    def to_frame(self, flags: Optional[Dict[str, np.ndarray]] = None) -> pd.DataFrame:
        frame = pd.DataFrame({"level": self.level, "ix": self.ix, "iy": self.iy, "side": self.side})
        for name, values in (flags or {}).items():
            frame[name] = np.asarray(values).astype(int)
        return frame


def _root_cubes(window: Box):
    base = min(window.width, window.height)
    nx = int(round(window.width / base))
    ny = int(round(window.height / base))
    ix, iy = np.meshgrid(np.arange(nx), np.arange(ny), indexing="xy")
    return base, ix.ravel().astype(np.int64), iy.ravel().astype(np.int64)


def whitney_decompose(
    F,
    window: Box,
    max_level: Optional[int] = None,
    closed_set_id: str = "F",
) -> WhitneyDecomposition:
    """Maximal dyadic cubes Q ⊂ window with diam Q ≤ dist(Q, F).

    Subdivision is level-synchronous: every candidate at a level is tested in one
    vectorised call, rejected cubes are split, cubes covered by F are dropped and
    rejected cubes at max_level form the truncation collar.

    Args:
        F: Nonempty closed set as a shapely geometry
        window: Decomposition window; its sides must be integer multiples of each other
        max_level: Finest level kept
        closed_set_id: Label recorded on the decomposition

    Returns:
        WhitneyDecomposition in canonical (level, ix, iy) order
    """
    max_level = int(resolve("max_level", max_level))
    if F is None or F.is_empty:
        raise EmptyClosedSet(f"closed set {closed_set_id} is empty")
    win = window.geometry()
    if not F.within(win) or F.distance(win.exterior) <= 0.0:
        raise WindowTooSmall(f"closed set {closed_set_id} reaches the window boundary")

    base, ix, iy = _root_cubes(window)
    level = 0
    shapely.prepare(F)
    accepted_level, accepted_ix, accepted_iy = [], [], []
    collar = np.zeros((0, 2), dtype=np.int64)
    truncated = False

    while len(ix):
        side = base * 2.0**-level
        x0 = window.xmin + ix * side
        y0 = window.ymin + iy * side
        boxes = shapely.box(x0, y0, x0 + side, y0 + side)
        dist = shapely.distance(boxes, F)
        accept = side * SQRT2 <= dist
        accepted_level.append(np.full(int(accept.sum()), level, dtype=np.int64))
        accepted_ix.append(ix[accept])
        accepted_iy.append(iy[accept])

        rejected = ~accept
        inside = np.zeros_like(rejected)
        inside[rejected] = shapely.covered_by(boxes[rejected], F)
        split = rejected & ~inside
        if level == max_level:
            if split.any():
                truncated = True
                collar = np.stack([ix[split], iy[split]], axis=1)
            break
        cx, cy = ix[split], iy[split]
        ix = np.concatenate([2 * cx, 2 * cx + 1, 2 * cx, 2 * cx + 1])
        iy = np.concatenate([2 * cy, 2 * cy, 2 * cy + 1, 2 * cy + 1])
        level += 1

    lv = np.concatenate(accepted_level)
    ax = np.concatenate(accepted_ix)
    ay = np.concatenate(accepted_iy)
    order = np.argsort(cube_keys(lv, ax, ay), kind="stable")
    dec = WhitneyDecomposition(
        closed_set_id=closed_set_id,
        closed_set=F,
        window=window,
        base_scale=base,
        level=lv[order],
        ix=ax[order],
        iy=ay[order],
        max_level=max_level,
        truncated=truncated,
        collar=collar,
    )
    if truncated:
        logger.warning(
            "Whitney(%s): truncated at level %d, collar of %d cubes (area %.3g)",
            closed_set_id,
            max_level,
            len(collar),
            dec.collar_area,
        )
    logger.info("Whitney(%s): %d cubes, levels %d..%d", closed_set_id, len(dec), dec.min_level, max_level)
    return dec
