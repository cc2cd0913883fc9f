# mixedtraces/norms/sobolev.py

import logging

import numpy as np

from mixedtraces.errors import NonpositiveP
from mixedtraces.extension.grid_function import GridFunction

from .lp import region_cells
from .params import NormReport

logger = logging.getLogger(__name__)


def discrete_gradient(f: GridFunction, region: str = "omega") -> np.ndarray:
    """∇f at the cells of `region`, one row per cell of region_cells(f, region).

    On Ω, differences only run across open faces: central where both faces along
    an axis are open, one-sided where only one is, zero where neither is. On the
    window every face is open and the window edge is one-sided.
    """
    h = f.h
    if region == "window":
        gy, gx = np.gradient(f.values, h, h)
        return np.stack([gx.ravel(), gy.ravel()], axis=1)
    if region != "omega":
        raise ValueError(f"Unsupported region: {region}")

    disc = f.disc
    size = f.grid.size
    faces = disc.faces
    live = faces.open
    a, b, axis = faces.a[live], faces.b[live], faces.axis[live]
    vals = f.flat
    cells = region_cells(f, region)
    grad = np.zeros((size, 2))
    for k in range(2):
        on = axis == k
        fwd = np.full(size, -1, dtype=np.int64)
        bwd = np.full(size, -1, dtype=np.int64)
        fwd[a[on]] = b[on]
        bwd[b[on]] = a[on]
        hf, hb = fwd >= 0, bwd >= 0
        up = np.where(hf, vals[np.maximum(fwd, 0)], vals)
        down = np.where(hb, vals[np.maximum(bwd, 0)], vals)
        span = (hf.astype(float) + hb.astype(float)) * h
        with np.errstate(invalid="ignore", divide="ignore"):
            grad[:, k] = np.where(span > 0, (up - down) / span, 0.0)
    return grad[cells]


def sobolev1_norm(f: GridFunction, p: float, region: str = "omega") -> NormReport:
    """‖f‖_p + ‖∇f‖_p with the discrete gradient of `discrete_gradient`.

    Args:
        f: Grid function
        p: Integrability exponent
        region: "omega" or "window"

    Returns:
        NormReport with parts `lp` and `grad`
    """
    if not p >= 1:
        raise NonpositiveP(f"p must be at least 1, got {p}", operation="sobolev1_norm")
    h = f.h
    cells = region_cells(f, region)
    lp = float(((np.abs(f.flat[cells]) ** p).sum() * h * h) ** (1.0 / p))
    grad = np.linalg.norm(discrete_gradient(f, region), axis=1)
    gp = float(((grad**p).sum() * h * h) ** (1.0 / p))
    logger.debug("W^{1,%g} norm of %s on %s: %.6g + %.6g", p, f.name, region, lp, gp)
    return NormReport(op="sobolev1", value=lp + gp, h=h, s=1.0, p=p, parts={"lp": lp, "grad": gp})
