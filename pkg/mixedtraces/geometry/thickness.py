# mixedtraces/geometry/thickness.py

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from mixedtraces.errors import EmptyGamma

from .domain import DomainModel
from .regularity import disk, sample_along

logger = logging.getLogger(__name__)


@dataclass
class ThicknessReport:
    """Interior thickness |B(x,r) ∩ Ω| / |B(x,r)| at points of Γ."""

    min_ratio: float
    samples: List[Tuple[Tuple[float, float], float, float]] = field(default_factory=list)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [(c[0], c[1], r, v) for c, r, v in self.samples],
            columns=["x", "y", "radius", "ratio"],
        )


def interior_thickness(
    domain: DomainModel,
    radii: Sequence[float],
    boundary_samples: int = 32,
    points: Optional[np.ndarray] = None,
) -> ThicknessReport:
    """Minimum of |B(x,r) ∩ Ω| / |B(x,r)| over sampled x ∈ Γ and r ∈ radii.

    Explicit `points` (assumed on Γ) replace the arclength sampling.
    """
    if not domain.has_gamma:
        raise EmptyGamma("Γ is empty", operation="interior_thickness")
    radii = [float(r) for r in radii]
    if any(not (0.0 < r <= 1.0) for r in radii):
        raise ValueError("radii must lie in (0, 1]")
    pts = sample_along(domain.gamma_set, boundary_samples) if points is None else np.atleast_2d(points)

    samples = []
    for x in pts:
        for r in radii:
            ball = disk(x, r)
            ratio = domain.polygon.intersection(ball).area / ball.area
            samples.append(((float(x[0]), float(x[1])), r, float(ratio)))
    report = ThicknessReport(min_ratio=min(s[2] for s in samples), samples=samples)
    logger.info("Interior thickness on %s: min ratio %.4f", domain.name, report.min_ratio)
    return report
