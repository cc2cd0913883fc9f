# mixedtraces/experiments/families.py

import logging
from typing import List, Optional

import numpy as np

from mixedtraces.dataflows.config import resolve
from mixedtraces.extension.cutoff import cutoff_profile
from mixedtraces.extension.grid_function import Discretization, GridFunction
from mixedtraces.geometry.domain import DomainModel

logger = logging.getLogger(__name__)

FAMILY_KINDS = ("bumps", "bumps-away-from-D", "polynomial-times-cutoff")
# support clearance of bumps-away-from-D, in cells
CLEARANCE_CELLS = 4
CUTOFF_ORDERS = (2, 4, 8, 16)
# smallest bump radius, relative to diam(Ω)
RADIUS_FLOOR = 0.05
_BATCH = 256
_MAX_BATCHES = 64


def bump(points: np.ndarray, center: np.ndarray, radius: float) -> np.ndarray:
    """exp(1 − 1/(1 − |x − c|²/r²)) inside the open ball, 0 outside."""
    q = ((points - center) ** 2).sum(axis=1) / radius**2
    out = np.zeros(len(points))
    inner = q < 1.0
    out[inner] = np.exp(1.0 - 1.0 / (1.0 - q[inner]))
    return out


def _bump_centers(domain: DomainModel, count: int, rng: np.random.Generator, clearance: Optional[float]):
    """Rejection-sample centers in Ω; they depend on the domain only, never on h."""
    box = domain.bounds
    floor = RADIUS_FLOOR * domain.diameter
    centers, room = [], []
    for _ in range(_MAX_BATCHES):
        pts = rng.uniform((box.xmin, box.ymin), (box.xmax, box.ymax), size=(_BATCH, 2))
        ok = domain.contains(pts)
        if clearance is not None and domain.has_d:
            r = domain.distance(pts, "D") - clearance
        else:
            r = np.full(len(pts), np.inf)
        ok &= r >= floor
        centers.extend(pts[ok])
        room.extend(r[ok])
        if len(centers) >= count:
            return np.array(centers[:count]), np.array(room[:count])
    raise ValueError(f"{domain.name}: no room for a bump of radius {floor:g} at clearance {clearance}")


def _bumps(disc: Discretization, count: int, rng: np.random.Generator, clearance: Optional[float]) -> List[GridFunction]:
    domain = disc.domain
    size = domain.diameter
    centers, room = _bump_centers(domain, count, rng, clearance)
    radii = rng.uniform(0.1, 0.3, size=count) * size
    amplitudes = rng.uniform(0.5, 1.5, size=count) * rng.choice([-1.0, 1.0], size=count)
    lo = max(RADIUS_FLOOR * size, 2 * disc.h)
    out = []
    for i in range(count):
        radius = min(max(radii[i], lo), room[i])
        values = amplitudes[i] * bump(disc.centers, centers[i], radius)
        out.append(disc.function(values, name=f"bump-{i:03d}"))
    return out


def _polynomials(disc: Discretization, count: int, rng: np.random.Generator, clearance: float) -> List[GridFunction]:
    box = disc.domain.bounds
    c = disc.centers
    u = (c[:, 0] - box.xmin) / max(box.width, 1e-300)
    v = (c[:, 1] - box.ymin) / max(box.height, 1e-300)
    monomials = np.stack([np.ones_like(u), u, v, u * u, u * v, v * v], axis=1)
    orders = [m for m in CUTOFF_ORDERS if 1.0 / m >= clearance] or [CUTOFF_ORDERS[0]]
    coeffs = rng.normal(size=(count, monomials.shape[1]))
    picks = rng.choice(orders, size=count)
    out = []
    for i in range(count):
        values = monomials @ coeffs[i]
        if disc.domain.has_d:
            values = values * (1.0 - cutoff_profile(disc.dist_d, int(picks[i])))
        out.append(disc.function(values, name=f"poly-{i:03d}"))
    return out


def generate_family(
    kind: str,
    count: Optional[int],
    seed: Optional[int],
    disc: Discretization,
    clearance: Optional[float] = None,
) -> List[GridFunction]:
    """Deterministic pseudo-random test functions on Ω.

    The members are continuous functions sampled at the cell centers; with the
    same clearance they are the same functions at every h.

    Args:
        kind: "bumps", "bumps-away-from-D" (dist(supp f, D) ≥ clearance) or
            "polynomial-times-cutoff" (quadratics times 1 − v_m)
        count: Number of members
        seed: Seed of the generator
        disc: Grid the members are sampled on
        clearance: Distance kept from D, at least 4h; defaults to 4h

    Returns:
        List of GridFunction
    """
    if kind not in FAMILY_KINDS:
        raise ValueError(f"Unsupported family kind: {kind}")
    count = int(resolve("family_size", count))
    seed = int(resolve("seed", seed))
    if count < 1:
        raise ValueError(f"count must be at least 1, got {count}")
    floor = CLEARANCE_CELLS * disc.h
    clearance = floor if clearance is None else float(clearance)
    if clearance < floor * (1 - 1e-12):
        raise ValueError(f"clearance {clearance:g} is below {CLEARANCE_CELLS}h = {floor:g}")
    rng = np.random.default_rng(seed)
    if kind == "bumps":
        family = _bumps(disc, count, rng, clearance=None)
    elif kind == "bumps-away-from-D":
        family = _bumps(disc, count, rng, clearance=clearance)
    else:
        family = _polynomials(disc, count, rng, clearance)
    logger.debug("Generated %d %s functions (seed %d) on %s", count, kind, seed, disc.domain.name)
    return family
