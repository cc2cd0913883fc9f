# mixedtraces/norms/lp.py

from typing import Optional

import numpy as np

from mixedtraces.errors import NonpositiveP
from mixedtraces.extension.grid_function import GridFunction

from .params import NormReport

# 4 × 4 sub-cell samples for cells touching the singular set
_SUB = 4


def region_cells(f: GridFunction, region: str = "omega") -> np.ndarray:
    """Flat indices of the cells integrated over."""
    if region == "omega":
        return np.flatnonzero(f.disc.interior)
    if region == "window":
        return np.arange(f.grid.size)
    raise ValueError(f"Unsupported region: {region}")


def distance_weight(f: GridFunction, cells: np.ndarray, exponent: float) -> np.ndarray:
    """Cell weights d_D^{−exponent}; cells closer than h/2 to D use a 16-point average."""
    disc = f.disc
    dist = disc.dist_d[cells]
    with np.errstate(divide="ignore"):
        weight = np.where(np.isfinite(dist), dist ** (-exponent), 0.0)
    near = np.flatnonzero(dist < disc.h / 2)
    if len(near):
        h = disc.h
        off = (np.arange(_SUB) + 0.5) / _SUB - 0.5
        sub = np.array([(a, b) for b in off for a in off]) * h
        pts = (disc.centers[cells[near]][:, None, :] + sub[None]).reshape(-1, 2)
        d = disc.domain.distance(pts, "D").reshape(len(near), -1)
        with np.errstate(divide="ignore"):
            weight[near] = np.where(d > 0, d ** (-exponent), np.inf).mean(axis=1)
    return weight


def weighted_integral(f: GridFunction, s: float, p: float, region: str = "omega") -> float:
    """∫ |f|^p d_D^{−sp} over the region (0 when D = ∅)."""
    if not f.disc.domain.has_d:
        return 0.0
    cells = region_cells(f, region)
    vals = np.abs(f.flat[cells]) ** p
    live = vals > 0
    weight = distance_weight(f, cells[live], s * p)
    return float((vals[live] * weight).sum() * f.h**2)


def lp_norm(
    f: GridFunction,
    p: float,
    weight: Optional[str] = None,
    s: Optional[float] = None,
    region: str = "omega",
) -> NormReport:
    """(Σ |f|^p·w·h²)^{1/p} with w = 1 or w = d_D^{−sp}.

    Args:
        f: Grid function
        p: Integrability exponent, at least 1
        weight: None or "d_D"
        s: Smoothness entering the weight exponent sp
        region: "omega" or "window"

    Returns:
        NormReport
    """
    if not p >= 1:
        raise NonpositiveP(f"p must be at least 1, got {p}")
    if weight is None:
        cells = region_cells(f, region)
        value = float(((np.abs(f.flat[cells]) ** p).sum() * f.h**2) ** (1.0 / p))
        return NormReport(op="lp", value=value, h=f.h, p=p)
    if weight != "d_D":
        raise ValueError(f"Unsupported weight: {weight}")
    if s is None:
        raise ValueError("the d_D weight needs a smoothness s")
    value = weighted_integral(f, s, p, region) ** (1.0 / p)
    report = NormReport(op="weighted_lp", value=value, h=f.h, s=s, p=p)
    if not f.disc.domain.has_d:
        report.flags.append("empty-D")
    return report
