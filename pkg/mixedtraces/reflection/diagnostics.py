# mixedtraces/reflection/diagnostics.py

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np
import shapely

from mixedtraces.dataflows.config import resolve
from mixedtraces.whitney.cubes import box_gap

from .pairing import ReflectionMap

logger = logging.getLogger(__name__)

# Plateau/support factor of the partition of unity in the plane.
C_N = 1.0 + 1.0 / (16.0 * np.sqrt(2.0))


@dataclass
class ReflectionDiagnostics:
    """Independently recomputed pairing constants and replayed distance bounds."""

    constants: Dict[str, float]
    multiplicity_histogram: Dict[int, int]
    long_distance_constant: float
    exterior_layer_constant: float
    exterior_layer_budget: float
    exterior_layer_checked: int
    exterior_layer_violations: int
    unpaired: int
    notes: Dict[str, str] = field(default_factory=dict)

    def matches(self, diag: Dict[str, float], tol: float = 1e-12) -> bool:
        return all(abs(self.constants[k] - float(diag[k])) <= tol * max(1.0, abs(float(diag[k]))) for k in diag)


def _constants(rmap: ReflectionMap) -> Dict[str, float]:
    classes = rmap.classes
    dec_o, dec_g = classes.dec_omega, classes.dec_gamma
    q = rmap.paired
    if len(q) == 0:
        return {"C_size": 1.0, "C_dist": 0.0, "M": 0, "C_neighbor": 0.0}
    s = rmap.partner[q]
    # shapely distances, not the pairing's own gap arithmetic
    dist = shapely.distance(dec_o.boxes[q], dec_g.boxes[s])
    diam_q = dec_o.diam[q]
    diam_s = dec_g.diam[s]
    c_size = max(float((diam_s / diam_q).max()), float((diam_q / diam_s).max()))

    graph = dec_o.neighbor_graph.tocoo()
    paired = rmap.partner >= 0
    both = paired[graph.row] & paired[graph.col]
    a, b = graph.row[both], graph.col[both]
    c_nb = 0.0
    if len(a):
        d = shapely.distance(dec_g.boxes[rmap.partner[a]], dec_g.boxes[rmap.partner[b]])
        c_nb = float((d / dec_o.diam[a]).max())
    _, counts = np.unique(s, return_counts=True)
    return {
        "C_size": c_size,
        "C_dist": float((dist / diam_q).max()),
        "M": int(counts.max()),
        "C_neighbor": c_nb,
    }


def _histogram(rmap: ReflectionMap) -> Dict[int, int]:
    we = rmap.classes.exterior_index
    mult = np.zeros(len(we), dtype=np.int64)
    q = rmap.partner[we]
    ok = q >= 0
    if ok.any():
        counts = np.bincount(q[ok])
        mult[ok] = counts[q[ok]]
    values, freq = np.unique(mult, return_counts=True)
    return {int(v): int(f) for v, f in zip(values, freq)}


def _sample_pairs(graph, members: np.ndarray, limit: int) -> np.ndarray:
    coo = graph.tocoo()
    keep = members[coo.row] & members[coo.col] & (coo.row < coo.col)
    pairs = np.stack([coo.row[keep], coo.col[keep]], axis=1)
    pairs = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))] if len(pairs) else pairs
    if len(pairs) > limit:
        pairs = pairs[np.linspace(0, len(pairs) - 1, limit).round().astype(int)]
    return pairs


def _long_distance_replay(rmap: ReflectionMap, limit: int) -> float:
    """max D(P*, S*) / |x - y| over x ∈ Q, y ∈ c_n S ∖ B(x, ℓ(Q)/10)."""
    classes = rmap.classes
    dec_o, dec_g = classes.dec_omega, classes.dec_gamma
    paired = rmap.partner >= 0
    pairs = _sample_pairs(dec_o.neighbor_graph, paired, limit)
    if len(pairs) == 0:
        return 0.0
    S = np.flatnonzero(paired)
    s_star = rmap.partner[S]
    s_center = dec_o.centers[S]
    s_half = C_N * dec_o.side[S] / 2
    offsets = np.array([(a, b) for a in (0.0, 0.5, 1.0) for b in (0.0, 0.5, 1.0)])
    worst = 0.0
    for p, q in pairs:
        p_star = rmap.partner[p]
        long_d = (
            dec_g.diam[p_star]
            + dec_g.diam[s_star]
            + box_gap(dec_g.lower[p_star], dec_g.upper[p_star], dec_g.lower[s_star], dec_g.upper[s_star])
        )
        radius = dec_o.side[q] / 10
        for off in offsets:
            x = dec_o.lower[q] + off * dec_o.side[q]
            near = box_gap(x, x, s_center - s_half[:, None], s_center + s_half[:, None])
            far = np.sqrt(((np.abs(x - s_center) + s_half[:, None]) ** 2).sum(1))
            valid = far > radius
            sep = np.maximum(near, radius)
            if valid.any():
                worst = max(worst, float((long_d[valid] / sep[valid]).max()))
    return worst


def _exterior_layer_replay(rmap: ReflectionMap, lattice: int):
    """dist(x, D) / diam Q for Q ∉ w_e″, ℓ(Q) ≤ Aδ/16, touching P ∈ w_e, x ∈ P* ∩ Ω."""
    classes = rmap.classes
    domain = classes.domain
    dec_o, dec_g = classes.dec_omega, classes.dec_gamma
    small = (~classes.w_e_dprime) & (dec_o.side <= classes.A * classes.delta / 16)
    coo = dec_o.neighbor_graph.tocoo()
    keep = small[coo.row] & (rmap.partner[coo.col] >= 0)
    qs, ps = coo.row[keep], coo.col[keep]
    if len(qs) == 0:
        return 0.0, 0
    stars = np.unique(rmap.partner[ps])
    t = (np.arange(lattice) + 0.5) / lattice
    grid = np.array([(a, b) for b in t for a in t])
    pts = dec_g.lower[stars][:, None, :] + grid[None, :, :] * dec_g.side[stars][:, None, None]
    flat = pts.reshape(-1, 2)
    inside = domain.contains(flat).reshape(len(stars), -1)
    dist = np.where(inside, domain.distance(flat, "D").reshape(len(stars), -1), -np.inf)
    worst_by_star = dict(zip(stars.tolist(), dist.max(axis=1).tolist()))
    ratio = np.array([worst_by_star[int(rmap.partner[p])] for p in ps]) / dec_o.diam[qs]
    checked = int(np.isfinite(ratio).sum() + np.isposinf(ratio).sum())
    return ratio, checked


def verify_reflection(
    rmap: ReflectionMap,
    replay_samples: Optional[int] = None,
    lattice: int = 5,
    layer_budget: Optional[float] = None,
) -> ReflectionDiagnostics:
    """Recompute the pairing constants and replay the two distance bounds.

    Args:
        rmap: The reflection map
        replay_samples: Touching pairs used by the long-distance replay
        lattice: Side of the sample lattice placed in each reflected cube
        layer_budget: Constant C in dist(x, D) ≤ C·diam Q for the exterior layer replay

    Returns:
        ReflectionDiagnostics
    """
    limit = int(resolve("replay_samples", replay_samples))
    layer_budget = float(resolve("exterior_layer_budget", layer_budget))
    constants = _constants(rmap)
    hist = _histogram(rmap)
    long_c = _long_distance_replay(rmap, limit)
    ratio, checked = _exterior_layer_replay(rmap, lattice)
    ratio = np.atleast_1d(np.asarray(ratio, dtype=float))
    finite = ratio[np.isfinite(ratio)]
    layer_c = float(finite.max()) if len(finite) else 0.0
    violations = int((ratio > layer_budget).sum())
    diagnostics = ReflectionDiagnostics(
        constants=constants,
        multiplicity_histogram=hist,
        long_distance_constant=long_c,
        exterior_layer_constant=layer_c,
        exterior_layer_budget=layer_budget,
        exterior_layer_checked=checked,
        exterior_layer_violations=violations,
        unpaired=len(rmap.unpaired),
    )
    if violations:
        logger.warning(
            "%s: %d exterior-layer samples exceed dist(x,D) ≤ %.0f·diam Q",
            rmap.classes.domain.name,
            violations,
            layer_budget,
        )
    return diagnostics
