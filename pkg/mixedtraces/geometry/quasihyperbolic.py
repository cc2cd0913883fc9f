# mixedtraces/geometry/quasihyperbolic.py

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Tuple

import numpy as np
import shapely
from scipy import sparse
from scipy.sparse import csgraph

from mixedtraces.errors import UnreachablePoints
from mixedtraces.whitney.decomposition import WhitneyDecomposition, whitney_decompose

from .domain import Box, DomainModel

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class QuasihyperbolicMetric:
    """Graph approximation of k_Ξ over the Whitney cubes of Ξ = window ∖ F.

    Nodes are cube centers, edges join touching cubes and carry the weight
    |c_P − c_Q| / dist(midpoint, F). End segments from a query point to the
    center of its cube use the same midpoint rule. The result is an upper
    approximation whose error shrinks with the decomposition depth.
    """

    dec: WhitneyDecomposition
    omega: Optional[DomainModel] = None

    @property
    def excluded(self):
        return self.dec.closed_set

    @cached_property
    def graph(self) -> sparse.csr_matrix:
        coo = self.dec.neighbor_graph.tocoo()
        c = self.dec.centers
        length = np.linalg.norm(c[coo.row] - c[coo.col], axis=1)
        mid = (c[coo.row] + c[coo.col]) / 2
        weight = length / shapely.distance(shapely.points(mid), self.excluded)
        n = len(self.dec)
        return sparse.csr_matrix((weight, (coo.row, coo.col)), shape=(n, n))

    @cached_property
    def omega_sources(self) -> np.ndarray:
        """Cubes of the decomposition that meet Ω."""
        if self.omega is None:
            return np.zeros(0, dtype=np.int64)
        hits = shapely.intersects(self.dec.boxes, self.omega.polygon)
        return np.flatnonzero(hits)

    @cached_property
    def omega_graph_distance(self) -> np.ndarray:
        """Graph distance from every cube to the nearest cube meeting Ω."""
        src = self.omega_sources
        if len(src) == 0:
            return np.full(len(self.dec), np.inf)
        return csgraph.dijkstra(self.graph, directed=False, indices=src, min_only=True)

    def segment_cost(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a = np.atleast_2d(a)
        b = np.atleast_2d(b)
        mid = shapely.points((a + b) / 2)
        return np.linalg.norm(a - b, axis=1) / shapely.distance(mid, self.excluded)

    def _cube_of(self, point: np.ndarray) -> int:
        idx = int(self.dec.locate(point[None, :])[0])
        if idx < 0:
            raise UnreachablePoints(
                f"point {tuple(point)} is not covered by Whitney cubes of Ξ at level {self.dec.max_level}"
            )
        return idx

    def _solve(self, x: np.ndarray, y: np.ndarray):
        cx, cy = self._cube_of(x), self._cube_of(y)
        if cx == cy:
            return float(self.segment_cost(x, y)[0]), [x, y]
        dist, pred = csgraph.dijkstra(
            self.graph, directed=False, indices=cx, return_predecessors=True
        )
        if not np.isfinite(dist[cy]):
            raise UnreachablePoints(f"points {tuple(x)} and {tuple(y)} lie in different components of Ξ")
        centers = self.dec.centers
        value = (
            float(self.segment_cost(x, centers[cx])[0])
            + float(dist[cy])
            + float(self.segment_cost(centers[cy], y)[0])
        )
        chain = [cy]
        while chain[-1] != cx:
            chain.append(int(pred[chain[-1]]))
        polyline = [x] + [centers[i] for i in reversed(chain)] + [y]
        return value, polyline

    @staticmethod
    def _ordered(x, y) -> Tuple[np.ndarray, np.ndarray, bool]:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        swap = tuple(y) < tuple(x)
        return (y, x, True) if swap else (x, y, False)

    def distance(self, x, y) -> float:
        """k_Ξ(x, y); exactly symmetric because the pair is put in canonical order."""
        a, b, _ = self._ordered(x, y)
        if np.array_equal(a, b):
            return 0.0
        return self._solve(a, b)[0]

    def path(self, x, y) -> np.ndarray:
        """Polyline from x to y through the cube centers of the graph geodesic."""
        a, b, swapped = self._ordered(x, y)
        if np.array_equal(a, b):
            return np.stack([a, b])
        line = np.stack(self._solve(a, b)[1])
        return line[::-1] if swapped else line

    def distance_to_omega(self, points: np.ndarray) -> np.ndarray:
        """k_Ξ(z, Ω) for each point: 0 inside Ω, otherwise graph distance to a cube meeting Ω."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.zeros(len(pts))
        if self.omega is None:
            raise ValueError("metric was built without a domain")
        outside = ~self.omega.contains(pts)
        if not outside.any():
            return out
        idx = self.dec.locate(pts[outside])
        if (idx < 0).any():
            raise UnreachablePoints("a curve point is not covered by Whitney cubes of Ξ")
        centers = self.dec.centers[idx]
        end = self.segment_cost(pts[outside], centers)
        # a point of a cube meeting Ω is one end segment away from Ω
        out[outside] = np.where(np.isin(idx, self.omega_sources), end, end + self.omega_graph_distance[idx])
        return out


def domain_metric(domain: DomainModel, max_level: Optional[int] = None) -> Optional[QuasihyperbolicMetric]:
    """Metric of Ξ = plane ∖ closure(Γ) over the domain window; None when Γ = ∅."""
    if not domain.has_gamma:
        return None
    dec = whitney_decompose(domain.gamma_set, domain.window, max_level, closed_set_id="closure(Γ)")
    return QuasihyperbolicMetric(dec, omega=domain)


def quasihyperbolic_distance(
    x,
    y,
    excluded,
    window: Optional[Box] = None,
    max_level: Optional[int] = None,
    metric: Optional[QuasihyperbolicMetric] = None,
) -> float:
    """Quasihyperbolic distance k_Ξ(x, y) in Ξ = plane ∖ excluded.

    Args:
        x: First point
        y: Second point
        excluded: Closed set (shapely geometry) whose complement is Ξ
        window: Window of the Whitney decomposition, required unless `metric` is given
        max_level: Decomposition depth
        metric: A prebuilt metric to reuse across queries

    Returns:
        Nonnegative float; 0 when the excluded set is empty

    Raises:
        UnreachablePoints
    """
    if excluded is None or excluded.is_empty:
        return 0.0
    if metric is None:
        if window is None:
            raise ValueError("a window is required to decompose Ξ")
        metric = QuasihyperbolicMetric(whitney_decompose(excluded, window, max_level, closed_set_id="closure(Γ)"))
    value = metric.distance(x, y)
    logger.debug("k_Ξ(%s, %s) = %.6g", tuple(np.asarray(x)), tuple(np.asarray(y)), value)
    return value
