# mixedtraces/extension/cutoff.py

import numpy as np

from mixedtraces.errors import EmptyD

from .grid_function import Discretization, GridFunction


def cutoff_profile(dist: np.ndarray, m: int) -> np.ndarray:
    """1 for dist ≤ 1/m, 2 − m·dist up to 2/m, 0 beyond."""
    return np.clip(2.0 - m * np.asarray(dist, dtype=float), 0.0, 1.0)


def cutoff_vm(m: int, disc: Discretization) -> GridFunction:
    """Boundary cutoff v_m sampled at every cell center of the grid.

    Args:
        m: Positive integer
        disc: Discretization of a domain with nonempty D

    Returns:
        GridFunction v_m (not masked to Ω)
    """
    if int(m) != m or m < 1:
        raise ValueError(f"m must be a positive integer, got {m}")
    if not disc.domain.has_d:
        raise EmptyD(f"{disc.domain.name}: D is empty", operation="cutoff_vm")
    values = cutoff_profile(disc.dist_d, int(m))
    return GridFunction(disc, values, name=f"v_{int(m)}")


def lipschitz_violations(v: GridFunction, m: int, tol: float = 1e-12, limit: int = 4096) -> int:
    """Count grid pairs with |v(x) − v(y)| > min(1, m|x − y|) + tol.

    Pairs are taken between every cell and an evenly spaced subset of `limit` cells.
    """
    c = v.disc.centers
    vals = v.flat
    pick = np.linspace(0, len(vals) - 1, min(limit, len(vals))).round().astype(int)
    bad = 0
    for start in range(0, len(pick), 256):
        idx = pick[start : start + 256]
        dist = np.linalg.norm(c[idx][:, None, :] - c[None, :, :], axis=-1)
        jump = np.abs(vals[idx][:, None] - vals[None, :])
        bad += int((jump > np.minimum(1.0, m * dist) + tol).sum())
    return bad
