# mixedtraces/geometry/regularity.py

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import shapely

from mixedtraces.dataflows.config import resolve
from mixedtraces.errors import EmptySet

from .domain import DomainModel

logger = logging.getLogger(__name__)

# 4 * 64 = 256-gon disks; area deficit below 0.01%.
DISK_QUAD_SEGS = 64


@dataclass
class RegularityReport:
    """Measured Ahlfors constants H^d(B(x,r) ∩ E) / r^d over a sample sweep."""

    d: float
    c_lower: float
    c_upper: float
    budget: float
    samples: List[Tuple[Tuple[float, float], float, float]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return 1.0 / self.budget <= self.c_lower and self.c_upper <= self.budget

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [(c[0], c[1], r, v) for c, r, v in self.samples],
            columns=["x", "y", "radius", "ratio"],
        )


def segments_of(geom) -> np.ndarray:
    """All straight pieces of a (multi)line geometry as an (M, 2, 2) array."""
    pieces = []
    for line in getattr(geom, "geoms", [geom]):
        coords = np.asarray(line.coords)
        if len(coords) >= 2:
            pieces.append(np.stack([coords[:-1], coords[1:]], axis=1))
    if not pieces:
        return np.zeros((0, 2, 2))
    return np.concatenate(pieces)


def arclength_in_disk(segments: np.ndarray, center: np.ndarray, radius: float) -> float:
    """Exact length of the part of the segments lying in the closed disk."""
    a = segments[:, 0, :] - center
    d = segments[:, 1, :] - segments[:, 0, :]
    qa = (d**2).sum(1)
    qb = 2.0 * (a * d).sum(1)
    qc = (a**2).sum(1) - radius**2
    disc = qb**2 - 4.0 * qa * qc
    ok = (disc > 0) & (qa > 0)
    root = np.sqrt(np.where(ok, disc, 0.0))
    safe = np.where(qa > 0, qa, 1.0)
    t0 = np.clip((-qb - root) / (2.0 * safe), 0.0, 1.0)
    t1 = np.clip((-qb + root) / (2.0 * safe), 0.0, 1.0)
    lengths = np.where(ok, (t1 - t0) * np.sqrt(qa), 0.0)
    return float(lengths.sum())


def disk(center: Sequence[float], radius: float):
    return shapely.Point(center).buffer(radius, quad_segs=DISK_QUAD_SEGS)


def sample_along(geom, count: int) -> np.ndarray:
    """`count` points equally spaced in arclength along a (multi)line."""
    total = geom.length
    if total <= 0 or count <= 0:
        return np.zeros((0, 2))
    merged = shapely.line_merge(geom) if geom.geom_type == "MultiLineString" else geom
    pieces = list(getattr(merged, "geoms", [merged]))
    lengths = np.array([p.length for p in pieces])
    offsets = np.concatenate([[0.0], np.cumsum(lengths)])
    s = (np.arange(count) + 0.5) * total / count
    idx = np.clip(np.searchsorted(offsets, s, side="right") - 1, 0, len(pieces) - 1)
    pts = [pieces[i].interpolate(si - offsets[i]) for i, si in zip(idx, s)]
    return np.array([[p.x, p.y] for p in pts])


def _interior_lattice(domain: DomainModel, count: int) -> np.ndarray:
    box = domain.bounds
    side = max(int(np.ceil(np.sqrt(4 * count))), 2)
    xs = np.linspace(box.xmin, box.xmax, side + 2)[1:-1]
    ys = np.linspace(box.ymin, box.ymax, side + 2)[1:-1]
    grid = np.array([(x, y) for y in ys for x in xs])
    inside = grid[domain.contains(grid)]
    if len(inside) == 0:
        return inside
    pick = np.linspace(0, len(inside) - 1, min(count, len(inside))).round().astype(int)
    return inside[pick]


def check_d_set(
    domain: DomainModel,
    set_id: str,
    d: float,
    radii: Sequence[float],
    centers: int = 32,
    budget: Optional[float] = None,
) -> RegularityReport:
    """Measure the d-set constants of D, Γ, ∂Ω (d = 1) or Ω (d = 2).

    Args:
        domain: The domain model
        set_id: "D", "gamma", "boundary" or "omega"
        d: Dimension; 1 uses exact arclength clipping, 2 uses disk-polygon area
        radii: Radii in (0, 1]
        centers: Number of sample centers
        budget: Declared constant C; pass iff every ratio lies in [1/C, C]

    Returns:
        RegularityReport with c_lower, c_upper and every sample
    """
    budget = float(resolve("d_set_budget", budget))
    radii = [float(r) for r in radii]
    if any(not (0.0 < r <= 1.0) for r in radii):
        raise ValueError("radii must lie in (0, 1]")

    if set_id == "omega":
        if domain.area <= 0:
            raise EmptySet("Ω has no interior", operation="check_d_set")
        pts = np.concatenate(
            [sample_along(domain.boundary, centers // 2), _interior_lattice(domain, centers - centers // 2)]
        )
        region = domain.polygon

        def measure(x, r):
            return float(region.intersection(disk(x, r)).area)

    elif set_id in ("D", "gamma", "boundary"):
        geom = domain.target_geometry(set_id)
        if geom.is_empty:
            raise EmptySet(f"{set_id} has no points", operation="check_d_set")
        pts = sample_along(geom, centers)
        segs = segments_of(shapely.line_merge(geom) if geom.geom_type == "MultiLineString" else geom)

        def measure(x, r):
            return arclength_in_disk(segs, x, r)

    else:
        raise ValueError(f"Unsupported set for d-set check: {set_id}")

    samples = []
    for x in pts:
        for r in radii:
            samples.append(((float(x[0]), float(x[1])), r, measure(x, r) / r**d))
    ratios = np.array([s[2] for s in samples])
    report = RegularityReport(
        d=d, c_lower=float(ratios.min()), c_upper=float(ratios.max()), budget=budget, samples=samples
    )
    logger.info(
        "d-set check %s (d=%g): ratios in [%.4g, %.4g], budget %.3g",
        set_id,
        d,
        report.c_lower,
        report.c_upper,
        budget,
    )
    return report
