# mixedtraces/whitney/audit.py

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np
import pandas as pd
import shapely
from scipy.spatial import cKDTree

from mixedtraces.geometry.domain import DomainModel

from .classes import CubeClasses
from .decomposition import WhitneyDecomposition, cube_keys

logger = logging.getLogger(__name__)

MAX_NEIGHBORS = 144
BOUNDARY_LAYER_CONSTANT = 21.0
EXTERIOR_POINT_CONSTANT = 2.0
_REL = 1e-12


@dataclass
class WhitneyAudit:
    """Violation counts of the five Whitney axioms and the coverage fraction."""

    closed_set_id: str
    cubes: int
    violations: Dict[str, int]
    coverage: float
    max_neighbors: int
    truncated: bool
    collar_area: float

    @property
    def passed(self) -> bool:
        return all(v == 0 for v in self.violations.values()) and self.coverage >= 0.99

    def to_frame(self) -> pd.DataFrame:
        rows = [(self.closed_set_id, name, count, "PASS" if count == 0 else "FAIL") for name, count in self.violations.items()]
        rows.append((self.closed_set_id, "coverage", self.coverage, "PASS" if self.coverage >= 0.99 else "FAIL"))
        return pd.DataFrame(rows, columns=["closed_set", "axiom", "value", "status"])


@dataclass
class ReplayResult:
    """Outcome of a distance replay over a sample sweep."""

    name: str
    checked: int
    violations: int
    constant: float
    details: Dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.violations == 0


def audit_decomposition(dec: WhitneyDecomposition, coverage_samples: int = 256) -> WhitneyAudit:
    """Replay disjointness, the sandwich inequality, dyadic alignment, neighbour
    size ratio and neighbour count over every cube, and measure coverage."""
    n = len(dec)

    # disjoint interiors: no cube is a dyadic ancestor of another, no duplicates
    disjoint = n - len(np.unique(dec.keys))
    for d in range(1, int(dec.level.max(initial=0)) + 1):
        has = dec.level >= d
        anc = cube_keys(dec.level[has] - d, dec.ix[has] >> d, dec.iy[has] >> d)
        pos = np.clip(np.searchsorted(dec.keys, anc), 0, max(n - 1, 0))
        disjoint += int((dec.keys[pos] == anc).sum())

    dist = shapely.distance(dec.boxes, dec.closed_set)
    diam = dec.diam
    sandwich = int(((diam > dist * (1 + _REL)) | (dist > 4 * diam * (1 + _REL))).sum())

    w = dec.window
    roots_x = int(round(w.width / dec.base_scale))
    roots_y = int(round(w.height / dec.base_scale))
    expected_x = w.xmin + dec.ix * dec.side
    expected_y = w.ymin + dec.iy * dec.side
    aligned = (
        (dec.lower[:, 0] == expected_x)
        & (dec.lower[:, 1] == expected_y)
        & (dec.ix >= 0)
        & (dec.iy >= 0)
        & (dec.ix < roots_x * (1 << dec.level))
        & (dec.iy < roots_y * (1 << dec.level))
        & (dec.upper[:, 0] <= w.xmax)
        & (dec.upper[:, 1] <= w.ymax)
    )
    alignment = int((~aligned).sum())

    graph = dec.neighbor_graph.tocoo()
    ratio = dec.side[graph.row] / dec.side[graph.col]
    neighbor_ratio = int(((ratio < 0.25) | (ratio > 4.0)).sum())
    degree = np.diff(dec.neighbor_graph.indptr) if n else np.zeros(0, dtype=int)
    neighbor_count = int((degree > MAX_NEIGHBORS).sum())

    # coverage of window ∖ (F ∪ collar) by a fixed lattice
    pts = w.cell_centers(max(w.width, w.height) / coverage_samples)
    eligible = shapely.distance(shapely.points(pts), dec.closed_set) > 0
    if len(dec.collar):
        side = dec.base_scale * 2.0**-dec.max_level
        cx = np.floor((pts[:, 0] - w.xmin) / side).astype(np.int64)
        cy = np.floor((pts[:, 1] - w.ymin) / side).astype(np.int64)
        collar_keys = np.sort(dec.collar[:, 0] * (1 << 32) + dec.collar[:, 1])
        probe = cx * (1 << 32) + cy
        pos = np.clip(np.searchsorted(collar_keys, probe), 0, len(collar_keys) - 1)
        eligible &= collar_keys[pos] != probe
    located = dec.locate(pts[eligible]) >= 0
    coverage = float(located.mean()) if len(located) else 1.0

    audit = WhitneyAudit(
        closed_set_id=dec.closed_set_id,
        cubes=n,
        violations={
            "disjoint_interiors": disjoint,
            "sandwich": sandwich,
            "dyadic_alignment": alignment,
            "neighbor_ratio": neighbor_ratio,
            "neighbor_count": neighbor_count,
        },
        coverage=coverage,
        max_neighbors=int(degree.max(initial=0)),
        truncated=dec.truncated,
        collar_area=dec.collar_area,
    )
    logger.info("Whitney audit %s: %s, coverage %.4f", dec.closed_set_id, audit.violations, coverage)
    return audit


def replay_boundary_layer(classes: CubeClasses) -> ReplayResult:
    """For Q ∈ w_e ∖ w_e′ with ℓ(Q) ≤ Aδ/4: dist(Q,Γ)/B < dist(Q,D) ≤ 21·dist(Q,Γ)."""
    dec = classes.dec_omega
    sel = classes.w_e & ~classes.w_e_prime & (dec.side <= classes.A * classes.delta / 4)
    dd, dg = classes.dist_d[sel], classes.dist_gamma[sel]
    lower_ok = dg / classes.B < dd
    upper_ok = dd <= BOUNDARY_LAYER_CONSTANT * dg * (1 + _REL)
    with np.errstate(divide="ignore", invalid="ignore"):
        measured = float(np.max(dd / dg, initial=0.0))
    return ReplayResult(
        name="boundary_layer",
        checked=int(sel.sum()),
        violations=int((~(lower_ok & upper_ok)).sum()),
        constant=measured,
    )


def _omega_samples(domain: DomainModel, h: float) -> np.ndarray:
    pts = domain.bounds.cell_centers(h)
    return pts[domain.contains(pts)]


def replay_exterior_point(classes: CubeClasses, h: float, lattice: int = 5) -> ReplayResult:
    """For x ∈ Ω and y ∈ Q ∖ Ω with Q ∈ w_i: dist(x, D) ≤ 2|x − y|."""
    domain = classes.domain
    dec = classes.dec_gamma
    if dec is None or not classes.w_i.any() or not domain.has_d:
        return ReplayResult("exterior_point", 0, 0, 0.0)
    t = np.linspace(0.0, 1.0, lattice)
    offsets = np.array([(a, b) for b in t for a in t])
    wi = classes.interior_index
    pts = (dec.lower[wi][:, None, :] + offsets[None] * dec.side[wi][:, None, None]).reshape(-1, 2)
    outside = pts[~domain.contains(pts)]
    if len(outside) == 0:
        return ReplayResult("exterior_point", 0, 0, 0.0)
    xs = _omega_samples(domain, h)
    nearest, _ = cKDTree(outside).query(xs)
    dist_d = domain.distance(xs, "D")
    bad = dist_d > EXTERIOR_POINT_CONSTANT * nearest * (1 + _REL) + _REL
    with np.errstate(divide="ignore"):
        measured = float(np.max(dist_d / nearest, initial=0.0))
    return ReplayResult("exterior_point", int(len(xs)), int(bad.sum()), measured, {"exterior_samples": float(len(outside))})


def replay_exterior_separation(classes: CubeClasses, h: float, window_margin: Optional[float] = None) -> ReplayResult:
    """Best C_e with |x − y| ≥ C_e·min(1, dist(x, D)) for x ∈ Ω, y ∉ Ω ∪ Ω_e′."""
    domain = classes.domain
    margin = domain.diameter / 4 if window_margin is None else window_margin
    box = domain.bounds.expanded(margin)
    pts = box.cell_centers(h)
    inside = domain.contains(pts)
    xs = pts[inside]
    ys = pts[~inside]
    dec = classes.dec_omega
    located = dec.locate(ys)
    in_layer = np.zeros(len(ys), dtype=bool)
    hit = located >= 0
    in_layer[hit] = classes.w_e_prime[located[hit]]
    ys = ys[~in_layer]
    if len(ys) == 0 or len(xs) == 0:
        return ReplayResult("exterior_separation", 0, 0, np.inf)
    nearest, _ = cKDTree(ys).query(xs)
    scale = np.minimum(1.0, domain.distance(xs, "D"))
    c_e = float((nearest / scale).min())
    return ReplayResult("exterior_separation", int(len(xs)), int(c_e <= 0), c_e)
