# mixedtraces/geometry/cigar.py

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import shapely

from mixedtraces.errors import PairOutsideDomain, UnreachablePoints

from .domain import DomainModel
from .quasihyperbolic import QuasihyperbolicMetric, domain_metric

logger = logging.getLogger(__name__)

SAGITTA_FRACTIONS = (0.125, 0.25, 0.5, 1.0, 2.0)
CURVE_SAMPLES = 129


@dataclass
class CigarPair:
    x: Tuple[float, float]
    y: Tuple[float, float]
    epsilon: float
    excursion: float
    curve: str
    passed: bool
    candidates: Dict[str, float] = field(default_factory=dict)


@dataclass
class CigarReport:
    """Best cigar constants found per pair over a finite curve family.

    The search is one-sided: a pair that misses the targets is INCONCLUSIVE.
    """

    eps_target: float
    K_target: float
    pairs: List[CigarPair]

    @property
    def passed(self) -> bool:
        return all(p.passed for p in self.pairs)

    @property
    def status(self) -> str:
        return "PASS" if self.passed else "INCONCLUSIVE"

    @property
    def min_epsilon(self) -> float:
        return min((p.epsilon for p in self.pairs), default=1.0)

    @property
    def max_excursion(self) -> float:
        return max((p.excursion for p in self.pairs), default=0.0)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [
                (p.x[0], p.x[1], p.y[0], p.y[1], p.curve, p.epsilon, p.excursion, "PASS" if p.passed else "INCONCLUSIVE")
                for p in self.pairs
            ],
            columns=["x0", "x1", "y0", "y1", "curve", "epsilon", "excursion", "status"],
        )


def _resample(polyline: np.ndarray, count: int) -> np.ndarray:
    seg = np.linalg.norm(np.diff(polyline, axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    if s[-1] == 0:
        return polyline[:1].repeat(count, axis=0)
    t = np.linspace(0.0, s[-1], count)
    return np.stack([np.interp(t, s, polyline[:, 0]), np.interp(t, s, polyline[:, 1])], axis=1)


def circular_arc(x: np.ndarray, y: np.ndarray, sagitta: float, count: int = CURVE_SAMPLES) -> np.ndarray:
    """Arc from x to y bulging by `sagitta` to the left of x→y (right if negative)."""
    chord = y - x
    c = float(np.linalg.norm(chord))
    a = c / 2
    s = abs(sagitta)
    normal = np.array([-chord[1], chord[0]]) / c * np.sign(sagitta)
    radius = (a * a + s * s) / (2 * s)
    mid = (x + y) / 2
    center = mid + normal * (s - radius)
    half = 2 * np.arctan(s / a)
    apex = np.arctan2(normal[1], normal[0])
    phi = np.linspace(-half, half, count)
    pts = center + radius * np.stack([np.cos(apex + phi), np.sin(apex + phi)], axis=1)
    if np.linalg.norm(pts[0] - x) > np.linalg.norm(pts[-1] - x):
        pts = pts[::-1]
    pts[0], pts[-1] = x, y
    return pts


def curve_epsilon(domain: DomainModel, x: np.ndarray, y: np.ndarray, curve: np.ndarray) -> float:
    """Largest ε for which the curve satisfies the length and cigar conditions.

    Returns 0 when the curve meets closure(Γ).
    """
    dxy = float(np.linalg.norm(y - x))
    length = float(np.linalg.norm(np.diff(curve, axis=0), axis=1).sum())
    eps_len = dxy / length if length > 0 else 1.0
    if not domain.has_gamma:
        return min(1.0, eps_len)
    if shapely.intersects(shapely.LineString(curve), domain.gamma_set):
        return 0.0
    z = _resample(curve, 4 * CURVE_SAMPLES)
    weight = np.linalg.norm(z - x, axis=1) * np.linalg.norm(z - y, axis=1) / dxy
    dist = domain.distance(z, "gamma")
    active = weight > 0
    eps_cigar = float((dist[active] / weight[active]).min()) if active.any() else np.inf
    return float(min(1.0, eps_len, eps_cigar))


def _candidates(x, y, metric: Optional[QuasihyperbolicMetric]) -> Dict[str, np.ndarray]:
    curves = {"segment": np.stack([x, y])}
    a = np.linalg.norm(y - x) / 2
    for frac in SAGITTA_FRACTIONS:
        for sign, side in ((1.0, "left"), (-1.0, "right")):
            curves[f"arc-{side}-{frac:g}"] = circular_arc(x, y, sign * frac * a)
    if metric is not None:
        try:
            curves["graph-geodesic"] = metric.path(x, y)
        except UnreachablePoints:
            logger.debug("no graph geodesic between %s and %s", tuple(x), tuple(y))
    return curves


def check_cigar(
    domain: DomainModel,
    pairs: Sequence[Tuple[Sequence[float], Sequence[float]]],
    eps_target: float,
    K_target: float,
    max_level: Optional[int] = None,
    metric: Optional[QuasihyperbolicMetric] = None,
) -> CigarReport:
    """Search straight, circular-arc and graph-geodesic curves for each pair.

    Args:
        domain: The domain model
        pairs: Point pairs in Ω with |x − y| < δ
        eps_target: Required ε for the length and cigar conditions
        K_target: Allowed quasihyperbolic excursion k_Ξ(z, Ω) along the curve
        max_level: Whitney depth for the metric of Ξ
        metric: Prebuilt metric of Ξ, reused across calls

    Returns:
        CigarReport

    Raises:
        PairOutsideDomain
    """
    if metric is None:
        metric = domain_metric(domain, max_level)
    results = []
    for x, y in pairs:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        inside = domain.contains(np.stack([x, y]))
        if not inside.all():
            raise PairOutsideDomain(f"pair {tuple(x)}, {tuple(y)} is not inside {domain.name}")
        if np.linalg.norm(x - y) >= domain.delta:
            raise ValueError(f"pair separation {np.linalg.norm(x - y):.4g} is not below δ = {domain.delta:.4g}")
        if np.array_equal(x, y):
            results.append(CigarPair(tuple(x), tuple(y), 1.0, 0.0, "point", True, {"point": 1.0}))
            continue

        best = None
        scores = {}
        for name, curve in _candidates(x, y, metric).items():
            eps = curve_epsilon(domain, x, y, curve)
            scores[name] = eps
            if eps <= 0:
                continue
            excursion = 0.0
            if metric is not None:
                try:
                    excursion = float(metric.distance_to_omega(_resample(curve, CURVE_SAMPLES)).max())
                except UnreachablePoints:
                    continue
            ok = eps >= eps_target and excursion <= K_target
            rank = (ok, eps, -excursion)
            if best is None or rank > best[0]:
                best = (rank, name, eps, excursion, ok)

        if best is None:
            results.append(CigarPair(tuple(x), tuple(y), 0.0, np.inf, "none", False, scores))
        else:
            _, name, eps, excursion, ok = best
            results.append(CigarPair(tuple(x), tuple(y), eps, excursion, name, ok, scores))

    report = CigarReport(eps_target=float(eps_target), K_target=float(K_target), pairs=results)
    logger.info(
        "Cigar check on %s: %d pairs, min ε %.4g, max excursion %.4g, %s",
        domain.name,
        len(results),
        report.min_epsilon,
        report.max_excursion,
        report.status,
    )
    return report
