# mixedtraces/interpolation/solvers.py

import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import optimize

from mixedtraces.errors import SolverDiverged

logger = logging.getLogger(__name__)

LOG_LAMBDA_RANGE = (-12.0, 12.0)
LOG_LAMBDA_STEP = 0.5
# relative neighbourhood in which a located λ is checked for local optimality
_PROBE = 2.0 ** (1.0 / 64)


@dataclass
class SearchResult:
    x: np.ndarray
    value: float
    residual: float
    iterations: int
    parameter: Optional[float] = None


def lambda_search(
    objective: Callable[[np.ndarray], float],
    minimiser: Callable[[float], np.ndarray],
) -> SearchResult:
    """Minimise objective(minimiser(λ)) over λ > 0.

    A log-spaced scan locates the best bracket, a bounded Brent search refines
    it. The residual is the relative gain still available at λ·2^{±1/64}.

    Args:
        objective: True objective of a candidate
        minimiser: λ ↦ closed-form candidate

    Returns:
        SearchResult with the best candidate and its λ
    """
    lo, hi = LOG_LAMBDA_RANGE
    grid = np.arange(lo, hi + LOG_LAMBDA_STEP / 2, LOG_LAMBDA_STEP)
    values = np.array([objective(minimiser(10.0**e)) for e in grid])
    best = int(np.argmin(values))
    left = grid[max(best - 1, 0)]
    right = grid[min(best + 1, len(grid) - 1)]

    def along(e: float) -> float:
        return objective(minimiser(10.0**e))

    res = optimize.minimize_scalar(along, bounds=(left, right), method="bounded", options={"xatol": 1e-6})
    e_star = float(res.x) if res.fun <= values[best] else float(grid[best])
    lam = 10.0**e_star
    x = minimiser(lam)
    value = objective(x)
    neighbours = min(objective(minimiser(lam * _PROBE)), objective(minimiser(lam / _PROBE)))
    residual = max(0.0, value - neighbours) / value if value > 0 else 0.0
    return SearchResult(x=x, value=value, residual=residual, iterations=len(grid) + int(res.nfev), parameter=lam)


def fista(
    objective: Callable[[np.ndarray], float],
    gradient: Callable[[np.ndarray], np.ndarray],
    x0: np.ndarray,
    tol: float,
    max_iter: int,
    lipschitz: float = 1.0,
    grow: float = 2.0,
) -> SearchResult:
    """Monotone accelerated gradient descent with backtracking on a smooth objective.

    Stops when an accepted step lowers the objective by less than `tol`
    relative.

    Args:
        objective: Smooth objective
        gradient: Its gradient
        x0: Starting point
        tol: Relative objective change at which to stop
        max_iter: Iteration cap
        lipschitz: Initial Lipschitz estimate
        grow: Backtracking multiplier

    Returns:
        SearchResult

    Raises:
        SolverDiverged: the tolerance is not met within max_iter iterations
    """
    x = np.array(x0, dtype=float)
    fx = objective(x)
    y = x.copy()
    tk = 1.0
    L = float(lipschitz)
    change = np.inf
    for it in range(1, max_iter + 1):
        fy = objective(y)
        gy = gradient(y)
        for _ in range(64):
            z = y - gy / L
            d = z - y
            fz = objective(z)
            if fz <= fy + gy @ d + 0.5 * L * (d @ d):
                break
            L *= grow
        t_next = (1.0 + np.sqrt(1.0 + 4.0 * tk * tk)) / 2.0
        if fz <= fx:
            x_new, f_new = z, fz
        else:
            x_new, f_new = x, fx
        y = x_new + (tk / t_next) * (z - x_new) + ((tk - 1.0) / t_next) * (x_new - x)
        change = (fx - f_new) / fx if fx > 0 else 0.0
        accepted = fz <= fx
        x, fx, tk = x_new, f_new, t_next
        if fx == 0.0 or (accepted and change < tol):
            return SearchResult(x=x, value=fx, residual=change, iterations=it)
    raise SolverDiverged(f"relative change {change:.3g} above {tol:g} after {max_iter} iterations")
