# mixedtraces/geometry/domain.py

import json
import logging
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Annotated, List, Optional, Sequence, Tuple, Union

import numpy as np
import shapely
from pydantic import BaseModel, ValidationError, field_validator
from shapely.geometry import LineString, MultiLineString, Polygon
from shapely.ops import unary_union

from mixedtraces.errors import DisconnectedDomain, InvalidGeometry, MalformedSpec

logger = logging.getLogger(__name__)

Point = Tuple[float, float]
Polyline = List[Tuple[float, float]]

# Tolerance for boundary bookkeeping (coverage, arcs on the boundary).
GEOMETRY_TOL = 1e-9

TARGETS = ("D", "gamma", "boundary", "complement")


class DomainSpec(BaseModel):
    """Schema of a domain-spec document (see docs/domain-spec.md)."""

    name: str = "domain"
    rings: List[Polyline]
    d_arcs: List[Polyline] = []
    gamma_arcs: List[Polyline] = []
    slits: List[Polyline] = []
    window: Tuple[float, float, float, float]
    eps_delta: Optional[Tuple[float, float]] = None

    @field_validator("rings")
    @classmethod
    def _rings_nonempty(cls, rings):
        if not rings:
            raise ValueError("at least one ring (the outer boundary) is required")
        for ring in rings:
            if len(ring) < 3:
                raise ValueError("a ring needs at least three vertices")
        return rings

    @field_validator("d_arcs", "gamma_arcs", "slits")
    @classmethod
    def _arcs_are_polylines(cls, arcs):
        for arc in arcs:
            if len(arc) < 2:
                raise ValueError("an arc needs at least two vertices")
        return arcs

    @field_validator("window")
    @classmethod
    def _window_ordered(cls, window):
        xmin, ymin, xmax, ymax = window
        if not (xmax > xmin and ymax > ymin):
            raise ValueError("window must be (xmin, ymin, xmax, ymax) with positive extent")
        return window


@dataclass(frozen=True)
class Box:
    """Axis-aligned box (xmin, ymin, xmax, ymax)."""

    xmin: float
    ymin: float
    xmax: float
    ymax: float

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin

    @property
    def area(self) -> float:
        return self.width * self.height

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.xmin, self.ymin, self.xmax, self.ymax)

    def geometry(self) -> Polygon:
        return shapely.box(*self.as_tuple())

    def cell_centers(self, h: float) -> np.ndarray:
        """Centers of the h-cells tiling the box, row-major from the lower-left corner."""
        nx = int(round(self.width / h))
        ny = int(round(self.height / h))
        xs = self.xmin + (np.arange(nx) + 0.5) * h
        ys = self.ymin + (np.arange(ny) + 0.5) * h
        gx, gy = np.meshgrid(xs, ys, indexing="xy")
        return np.stack([gx.ravel(), gy.ravel()], axis=1)

    def expanded(self, margin: float) -> "Box":
        return Box(self.xmin - margin, self.ymin - margin, self.xmax + margin, self.ymax + margin)


def _lines(polylines: Sequence[Polyline]):
    if not polylines:
        return MultiLineString()
    return MultiLineString([LineString(p) for p in polylines])


def _ring_closed(ring: Polyline) -> Polyline:
    if tuple(ring[0]) != tuple(ring[-1]):
        return list(ring) + [ring[0]]
    return list(ring)


@dataclass(frozen=True, eq=False)
class DomainModel:
    """A polygonal open set Ω with boundary split into a closed part D and Γ.

    All distance and containment queries are vectorised through shapely and are
    exact for the polygonal data. The model is immutable and safe to share.
    """

    name: str
    rings: Tuple[np.ndarray, ...]
    d_arcs: Tuple[np.ndarray, ...]
    gamma_arcs: Tuple[np.ndarray, ...]
    window: Box
    slits: Tuple[np.ndarray, ...] = field(default_factory=tuple)
    eps_delta: Optional[Tuple[float, float]] = None

    @cached_property
    def polygon(self) -> Polygon:
        outer, *holes = [_ring_closed([tuple(v) for v in r]) for r in self.rings]
        return Polygon(outer, holes)

    @cached_property
    def slit_set(self):
        return _lines([[tuple(v) for v in s] for s in self.slits])

    @cached_property
    def d_set(self):
        return _lines([[tuple(v) for v in a] for a in self.d_arcs])

    @cached_property
    def gamma_set(self):
        return _lines([[tuple(v) for v in a] for a in self.gamma_arcs])

    @cached_property
    def boundary(self):
        return unary_union([self.polygon.boundary, self.slit_set])

    @cached_property
    def area(self) -> float:
        return float(self.polygon.area)

    @cached_property
    def diameter(self) -> float:
        hull = np.asarray(self.polygon.convex_hull.exterior.coords)
        diff = hull[:, None, :] - hull[None, :, :]
        return float(np.sqrt((diff**2).sum(-1)).max())

    @cached_property
    def bounds(self) -> Box:
        return Box(*self.polygon.bounds)

    @property
    def delta(self) -> float:
        """Declared δ, or diam(Ω) when no (ε, δ) was declared."""
        if self.eps_delta is not None:
            return float(self.eps_delta[1])
        return self.diameter

    @property
    def has_d(self) -> bool:
        return not self.d_set.is_empty

    @property
    def has_gamma(self) -> bool:
        return not self.gamma_set.is_empty

    def target_geometry(self, target: str):
        if target == "D":
            return self.d_set
        if target == "gamma":
            return self.gamma_set
        if target in ("boundary", "complement"):
            return self.boundary
        raise ValueError(f"Unsupported distance target: {target}")

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Membership in the open set Ω (slits excluded)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        inside = shapely.contains_xy(self.polygon, pts[:, 0], pts[:, 1])
        if self.slits and inside.any():
            on_slit = shapely.distance(shapely.points(pts[inside]), self.slit_set) <= GEOMETRY_TOL
            inside[np.flatnonzero(inside)[on_slit]] = False
        return inside

    def distance(self, points: np.ndarray, target: str) -> np.ndarray:
        """Exact distance from each point to `target`; +inf for an empty target."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        geom = self.target_geometry(target)
        if geom.is_empty:
            return np.full(len(pts), np.inf)
        dist = shapely.distance(shapely.points(pts), geom)
        if target == "complement":
            dist = np.where(self.contains(pts), dist, 0.0)
        return dist


def _validate(domain: DomainModel) -> None:
    for ring in domain.rings:
        lr = shapely.LinearRing(_ring_closed([tuple(v) for v in ring]))
        if not lr.is_simple:
            raise InvalidGeometry(f"{domain.name}: ring is self-intersecting")
    if not domain.polygon.is_valid:
        raise InvalidGeometry(f"{domain.name}: {shapely.is_valid_reason(domain.polygon)}")

    if domain.slits:
        outside = domain.slit_set.difference(domain.polygon.buffer(GEOMETRY_TOL))
        if outside.length > GEOMETRY_TOL:
            raise InvalidGeometry(f"{domain.name}: slit leaves the closure of the domain")

    boundary = domain.boundary
    declared = unary_union([domain.d_set, domain.gamma_set])
    uncovered = boundary.difference(declared.buffer(GEOMETRY_TOL))
    if uncovered.length > 10 * GEOMETRY_TOL:
        raise InvalidGeometry(
            f"{domain.name}: boundary not covered by d_arcs and gamma_arcs "
            f"(uncovered length {uncovered.length:.3g})"
        )
    off_boundary = declared.difference(boundary.buffer(GEOMETRY_TOL))
    if off_boundary.length > 10 * GEOMETRY_TOL:
        raise InvalidGeometry(f"{domain.name}: an arc does not lie on the boundary")
    if not domain.d_set.is_empty and not domain.gamma_set.is_empty:
        overlap = domain.d_set.intersection(domain.gamma_set)
        if overlap.length > 10 * GEOMETRY_TOL:
            raise InvalidGeometry(f"{domain.name}: D and Γ overlap beyond arc endpoints")

    cut = domain.polygon
    if domain.slits:
        cut = cut.difference(domain.slit_set.buffer(GEOMETRY_TOL, quad_segs=2))
    if cut.geom_type != "Polygon":
        raise DisconnectedDomain(f"{domain.name}: Ω splits into {len(cut.geoms)} components")

    window, box = domain.window, domain.bounds
    margin = min(
        box.xmin - window.xmin,
        box.ymin - window.ymin,
        window.xmax - box.xmax,
        window.ymax - box.ymax,
    )
    if margin < domain.diameter / 2 - GEOMETRY_TOL:
        raise InvalidGeometry(
            f"{domain.name}: window margin {margin:.4g} below diam(Ω)/2 = {domain.diameter / 2:.4g}"
        )
    ratio = max(window.width, window.height) / min(window.width, window.height)
    if abs(ratio - round(ratio)) > 1e-12:
        raise InvalidGeometry(f"{domain.name}: window sides must be integer multiples of each other")


def domain_from_spec(spec: DomainSpec) -> DomainModel:
    arr = lambda items: tuple(np.asarray(x, dtype=float) for x in items)
    domain = DomainModel(
        name=spec.name,
        rings=arr(spec.rings),
        d_arcs=arr(spec.d_arcs),
        gamma_arcs=arr(spec.gamma_arcs),
        slits=arr(spec.slits),
        window=Box(*spec.window),
        eps_delta=spec.eps_delta,
    )
    _validate(domain)
    logger.debug(
        "Loaded domain %s: |Ω|=%.4g, diam=%.4g, D arcs=%d, Γ arcs=%d",
        domain.name,
        domain.area,
        domain.diameter,
        len(domain.d_arcs),
        len(domain.gamma_arcs),
    )
    return domain


def load_domain(
    spec_text: Annotated[Union[str, dict, Path], "JSON text, parsed mapping, or path to a spec file"],
) -> DomainModel:
    """Parse and validate a domain-spec document.

    Args:
        spec_text: JSON text, an already parsed mapping, or a path to a JSON file

    Returns:
        DomainModel with every invariant checked

    Raises:
        MalformedSpec, InvalidGeometry, DisconnectedDomain
    """
    if isinstance(spec_text, Path):
        spec_text = spec_text.read_text()
    if isinstance(spec_text, str):
        try:
            payload = json.loads(spec_text)
        except json.JSONDecodeError as exc:
            raise MalformedSpec(f"domain spec is not valid JSON: {exc}") from exc
    else:
        payload = spec_text
    try:
        spec = DomainSpec.model_validate(payload)
    except ValidationError as exc:
        raise MalformedSpec(f"domain spec failed validation: {exc}") from exc
    return domain_from_spec(spec)
