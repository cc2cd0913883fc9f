# mixedtraces/geometry/distance.py

from typing import Annotated, Union

import numpy as np

from .domain import DomainModel


def dist_to(
    point: Annotated[Union[tuple, np.ndarray], "a point (x, y) or an (N, 2) array of points"],
    target: Annotated[str, "one of 'D', 'gamma', 'boundary', 'complement'"],
    domain: DomainModel,
) -> Union[float, np.ndarray]:
    """Exact Euclidean distance to a boundary part of the domain.

    Distance to an empty set is +inf, so weights d_D^{-sp} vanish when D = ∅.
    A single point gives a float, an array of points gives an array.
    """
    pts = np.asarray(point, dtype=float)
    dist = domain.distance(pts, target)
    if pts.ndim == 1:
        return float(dist[0])
    return dist
