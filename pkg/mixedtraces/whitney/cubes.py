# mixedtraces/whitney/cubes.py

from dataclasses import dataclass
from typing import Tuple

import numpy as np
import shapely

SQRT2 = float(np.sqrt(2.0))


@dataclass(frozen=True)
class DyadicCube:
    """A closed dyadic square of side base_scale * 2^-level."""

    level: int
    ix: int
    iy: int
    side: float
    x0: float
    y0: float

    @property
    def key(self) -> Tuple[int, int, int]:
        return (self.level, self.ix, self.iy)

    @property
    def center(self) -> Tuple[float, float]:
        return (self.x0 + self.side / 2, self.y0 + self.side / 2)

    @property
    def diam(self) -> float:
        return self.side * SQRT2

    @property
    def bounds(self) -> Tuple[float, float, float, float]:
        return (self.x0, self.y0, self.x0 + self.side, self.y0 + self.side)

    def geometry(self):
        return shapely.box(*self.bounds)


def box_gap(lo_a: np.ndarray, hi_a: np.ndarray, lo_b: np.ndarray, hi_b: np.ndarray) -> np.ndarray:
    """Euclidean distance between axis-aligned boxes given (…, 2) corner arrays."""
    gap = np.maximum(0.0, np.maximum(lo_a - hi_b, lo_b - hi_a))
    return np.sqrt((gap**2).sum(-1))


def long_distance(P: DyadicCube, Q: DyadicCube) -> float:
    """Long distance D(P, Q) = diam P + diam Q + dist(P, Q)."""
    gap = box_gap(
        np.array([P.x0, P.y0]),
        np.array([P.x0 + P.side, P.y0 + P.side]),
        np.array([Q.x0, Q.y0]),
        np.array([Q.x0 + Q.side, Q.y0 + Q.side]),
    )
    return float(P.diam + Q.diam + gap)
