# mixedtraces/elliptic/heat.py

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from .spectrum import Spectrum

logger = logging.getLogger(__name__)

N_DIM = 2
# b* is the largest b whose c(b, 0) stays within this factor of the smallest
GAUSSIAN_SLACK = 2.0
B_GRID = np.geomspace(1e-3, 1.0, 61)
W0_GRID = np.concatenate([[0.0], np.geomspace(1e-3, 1e3, 61)])
# kernel entries below this share of the maximum are rounding noise
NOISE_FLOOR = 1e-13


@dataclass(eq=False)
class KernelMatrix:
    """p_t(x, y) on free nodes, as a density against the cell measure h²."""

    t: float
    values: np.ndarray
    h: float

    def mass(self) -> np.ndarray:
        """Σ_y p_t(x, y) h² per x."""
        return self.values.sum(axis=1) * self.h**2

    def negativity(self) -> float:
        """−min p_t relative to max p_t (0 when nonnegative)."""
        top = float(self.values.max(initial=0.0))
        low = float(self.values.min(initial=0.0))
        return max(0.0, -low) / top if top > 0 else 0.0


@dataclass
class GaussianFit:
    """(c, b, w₀) with 0 ≤ p_t(x, y) ≤ c·t^{−n/2}·exp(w₀t − b|x − y|²/t) on the computed set."""

    c: float
    b: float
    w0: float
    times: Sequence[float]
    max_negativity: float
    max_violation: float

    @property
    def feasible(self) -> bool:
        return self.b > 0 and np.isfinite(self.c) and self.max_negativity <= 1e-8 and self.max_violation <= 1e-9

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [
                {
                    "c": self.c,
                    "b": self.b,
                    "w0": self.w0,
                    "times": ";".join(f"{t:g}" for t in self.times),
                    "negativity": self.max_negativity,
                    "violation": self.max_violation,
                    "feasible": self.feasible,
                }
            ]
        )


def _log_c(logp: np.ndarray, r2: np.ndarray, t: float, b: float, w0: float) -> float:
    """log of the smallest c for one t."""
    return float(np.max(logp + b * r2 / t)) + (N_DIM / 2) * np.log(t) - w0 * t


def fit_gaussian(
    spec: Spectrum,
    kernels: Sequence[KernelMatrix],
    b_grid: Optional[np.ndarray] = None,
    w0_grid: Optional[np.ndarray] = None,
) -> GaussianFit:
    """Feasibility search for Gaussian upper bounds over several times.

    b* is the largest grid value whose minimal c at w₀ = 0 stays within
    GAUSSIAN_SLACK of the smallest one; w₀* minimises c·e^{w₀·t_max} for b*.
    c is minimal for (b*, w₀*). The search runs in log space.

    Args:
        spec: Spectrum built from an OperatorMatrix
        kernels: Heat kernels at the fitted times
        b_grid: Candidate b values
        w0_grid: Candidate w₀ values

    Returns:
        GaussianFit
    """
    b_grid = B_GRID if b_grid is None else np.asarray(b_grid)
    w0_grid = W0_GRID if w0_grid is None else np.asarray(w0_grid)
    centers = spec.operator.disc.centers[spec.operator.node_map]
    r2 = ((centers[:, None, :] - centers[None, :, :]) ** 2).sum(-1)
    times = [k.t for k in kernels]
    t_max = max(times)

    logs = []
    for k in kernels:
        positive = k.values > NOISE_FLOOR * k.values.max(initial=0.0)
        logs.append((np.where(positive, np.log(np.where(positive, k.values, 1.0)), -np.inf), k.t))

    def log_c(b: float, w0: float) -> float:
        return max(_log_c(lp, r2, t, b, w0) for lp, t in logs)

    base = np.array([log_c(b, 0.0) for b in b_grid])
    ok = np.flatnonzero(base <= base[0] + np.log(GAUSSIAN_SLACK))
    b_star = float(b_grid[ok.max()])
    score = np.array([log_c(b_star, w0) + w0 * t_max for w0 in w0_grid])
    w0_star = float(w0_grid[int(np.argmin(score))])
    lc = log_c(b_star, w0_star)
    c = float(np.exp(lc))

    violation = 0.0
    for k in kernels:
        bound = c * k.t ** (-N_DIM / 2) * np.exp(w0_star * k.t - b_star * r2 / k.t)
        top = float(k.values.max(initial=0.0))
        if top > 0:
            violation = max(violation, float(((k.values - bound) / top).max()))
    fit = GaussianFit(
        c=c,
        b=b_star,
        w0=w0_star,
        times=times,
        max_negativity=max(k.negativity() for k in kernels),
        max_violation=max(violation, 0.0),
    )
    logger.info("Gaussian fit over t=%s: c=%.4g, b=%.4g, w0=%.4g, feasible=%s", times, c, b_star, w0_star, fit.feasible)
    return fit


def heat_kernel(spec: Spectrum, t: float, fit: bool = True):
    """p_t(x, y) = Σ_k e^{−tλ_k} v_k(x) v_k(y) / h² on free nodes, with its Gaussian fit.

    Args:
        spec: Spectrum built from an OperatorMatrix
        t: Time, t > 0
        fit: Also fit Gaussian bounds at this t

    Returns:
        (KernelMatrix, GaussianFit or None)
    """
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    h = spec.operator.h
    V = spec.eigenvectors
    values = (V * np.exp(-t * spec.eigenvalues)) @ V.T / h**2
    values = (values + values.T) / 2
    kernel = KernelMatrix(t=float(t), values=values, h=h)
    return kernel, (fit_gaussian(spec, [kernel]) if fit else None)
