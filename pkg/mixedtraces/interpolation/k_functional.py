# mixedtraces/interpolation/k_functional.py

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from mixedtraces.dataflows.config import resolve
from mixedtraces.errors import NonpositiveP
from mixedtraces.extension.grid_function import GridFunction
from mixedtraces.norms.params import NormReport

from .solvers import fista, lambda_search
from .space import CompetitorSpace, QuadraticSolver, competitor_space

logger = logging.getLogger(__name__)

LN2 = float(np.log(2.0))
# relative excess of a per-t solve over the pooled profile
SOLVER_GAP_TOL = 1e-3


@dataclass
class Candidate:
    """A competitor g with a = ‖f − g‖_p and b = ‖g‖_{1,p}; it bounds K(t) ≤ a + t·b."""

    source: str
    distance: float
    size: float
    residual: float = 0.0

    def value(self, t: float) -> float:
        return self.distance + t * self.size


class KSolver:
    """K(t, f) = inf_g ‖f − g‖_p + t·‖g‖_{1,p} over the competitor space.

    Every t is solved from scratch, so solves are independent and can run
    in parallel threads.
    """

    def __init__(
        self,
        f: GridFunction,
        p: float,
        space: Optional[CompetitorSpace] = None,
        quadratic: Optional[QuadraticSolver] = None,
        tol: Optional[float] = None,
        max_iter: Optional[int] = None,
        smoothing: Optional[float] = None,
    ):
        if not p > 1:
            raise NonpositiveP(f"the K-functional needs p > 1, got {p}", operation="k_functional")
        self.p = float(p)
        self.space = space or competitor_space(f.disc)
        self.quadratic = quadratic or QuadraticSolver(self.space)
        self.tol = float(resolve("solver_tol", tol))
        self.max_iter = int(resolve("solver_max_iter", max_iter))
        self.smoothing = float(resolve("smoothing", smoothing))
        self.f = self.space.restrict(f)
        self.f_free = self.f[self.space.free]

        sp = self.space
        projected = sp.embed(self.f_free)
        self.norm_p = sp.lp(self.f, self.p)
        self.norm_1p = sp.w1p(projected, self.p)
        self.base = [
            Candidate("zero", self.norm_p, 0.0),
            Candidate("projection", sp.lp(self.f - projected, self.p), self.norm_1p),
        ]

    @property
    def admissible(self) -> bool:
        return self.space.admissible(self.f)

    def _parts(self, x_free: np.ndarray):
        g = self.space.embed(x_free)
        return self.space.lp(self.f - g, self.p), self.space.w1p(g, self.p)

    def _smoothed(self, t: float):
        """Objective with ‖v‖_p replaced by (Σ h²(v² + ε²)^{p/2})^{1/p}, and its gradient."""
        p, eps, w = self.p, self.smoothing, self.space.h**2
        diff = self.space.diff_free
        free = self.space.free
        f = self.f

        def norm(v):
            return float((w * (v * v + eps * eps) ** (p / 2)).sum() ** (1.0 / p))

        def dnorm(v):
            n = norm(v)
            return n ** (1.0 - p) * w * (v * v + eps * eps) ** (p / 2 - 1.0) * v

        def objective(x):
            r = f.copy()
            r[free] -= x
            return norm(r) + t * (norm(x) + norm(diff @ x))

        def gradient(x):
            r = f.copy()
            r[free] -= x
            return -dnorm(r)[free] + t * (dnorm(x) + diff.T @ dnorm(diff @ x))

        return objective, gradient

    def candidates(self, t: float) -> List[Candidate]:
        """Competitors for one t: g = 0, g = Pf, the λ-family minimiser and, for p ≠ 2, its descent refinement."""
        if not t > 0:
            raise ValueError(f"t must be positive, got {t}")
        out = list(self.base)
        if self.space.n_free == 0:
            return out

        def objective(x):
            a, b = self._parts(x)
            return a + t * b

        found = lambda_search(objective, lambda lam: self.quadratic.solve(self.f_free, lam))
        a, b = self._parts(found.x)
        out.append(Candidate("quadratic", a, b, found.residual))
        if self.p != 2.0:
            smooth, grad = self._smoothed(t)
            refined = fista(smooth, grad, found.x, self.tol, self.max_iter)
            a, b = self._parts(refined.x)
            out.append(Candidate("descent", a, b, refined.residual))
        return out

    def solve(self, t: float):
        cands = self.candidates(t)
        best = min(cands, key=lambda c: c.value(t))
        return best.value(t), best.residual, cands


def k_functional(
    f: GridFunction,
    t: float,
    p: float,
    solver: Optional[KSolver] = None,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
) -> float:
    """Peetre K-functional K(t, f) between L^p(Ω) and the discrete W̊_D^{1,p}(Ω).

    Args:
        f: Grid function on Ω
        t: Weight of the W^{1,p} part, t > 0
        p: Exponent in (1, ∞)
        solver: A KSolver for f and p, reused across t
        tol: Relative tolerance of the p ≠ 2 descent
        max_iter: Iteration cap of the p ≠ 2 descent

    Returns:
        K(t, f)

    Raises:
        SolverDiverged: the descent did not converge
    """
    solver = solver or KSolver(f, p, tol=tol, max_iter=max_iter)
    value, _, _ = solver.solve(t)
    return float(value)


@dataclass
class KProfile:
    """K(t_j, f) on the dyadic grid t_j = 2^j, j = −J … J."""

    f_id: str
    p: float
    t_grid: np.ndarray
    k_values: np.ndarray
    solver_values: np.ndarray
    solver_residuals: np.ndarray
    norm_p: float
    norm_1p: float
    admissible: bool
    sources: List[str] = field(default_factory=list)

    @property
    def envelope(self) -> np.ndarray:
        """min(‖f‖_p, t·‖Pf‖_{1,p}); an upper bound of K only when f vanishes on the D band."""
        return np.minimum(self.norm_p, self.t_grid * self.norm_1p)

    def is_monotone(self, tol: float = 1e-9) -> bool:
        return bool(np.all(np.diff(self.k_values) >= -tol * max(1.0, self.k_values.max(initial=0.0))))

    def is_concave(self, tol: float = 1e-9) -> bool:
        """Midpoint test K(2^j) ≥ ⅔K(2^{j−1}) + ⅓K(2^{j+1})."""
        k = self.k_values
        if len(k) < 3:
            return True
        chord = (2.0 / 3.0) * k[:-2] + (1.0 / 3.0) * k[2:]
        return bool(np.all(k[1:-1] >= chord - tol * max(1.0, k.max())))

    def solver_gap(self) -> np.ndarray:
        """(K_solve(t_j) − K(t_j)) / K(t_j): how far each per-t solve sits above the pooled profile."""
        scale = np.maximum(np.abs(self.k_values), 1e-300)
        return (self.solver_values - self.k_values) / scale

    def solver_agrees(self, tol: float = SOLVER_GAP_TOL) -> bool:
        return bool(np.all(self.solver_gap() <= tol))

    def within_envelope(self, tol: float = 1e-9) -> bool:
        """K ≤ envelope; vacuously true for a non-admissible f."""
        if not self.admissible:
            return True
        return bool(np.all(self.k_values <= self.envelope * (1 + tol) + tol))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "f_id": self.f_id,
                "p": self.p,
                "t": self.t_grid,
                "K": self.k_values,
                "K_solve": self.solver_values,
                "envelope": self.envelope,
                "residual": self.solver_residuals,
                "source": self.sources,
            }
        )


def k_profile(
    f: GridFunction,
    p: float,
    J: Optional[int] = None,
    f_id: Optional[str] = None,
    solver: Optional[KSolver] = None,
    max_workers: Optional[int] = None,
) -> KProfile:
    """K(t, f) for t = 2^{−J} … 2^{J}.

    Candidates found at any t bound K at every t, so the profile takes at each
    t_j the minimum of a_i + t_j·b_i over all of them. The result is exactly
    nondecreasing and concave in t; the per-t solver values are kept alongside
    so that a solve falling short of the pooled profile shows in solver_gap.

    Args:
        f: Grid function on Ω
        p: Exponent in (1, ∞)
        J: Depth of the dyadic grid
        f_id: Identifier for the exports
        solver: A KSolver for f and p
        max_workers: Threads over t

    Returns:
        KProfile
    """
    J = int(resolve("k_depth", J))
    workers = int(resolve("max_workers", max_workers))
    solver = solver or KSolver(f, p)
    t_grid = 2.0 ** np.arange(-J, J + 1, dtype=float)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            solved = list(pool.map(solver.solve, t_grid))
    else:
        solved = [solver.solve(t) for t in t_grid]

    pool_cands = [c for _, _, cands in solved for c in cands]
    a = np.array([c.distance for c in pool_cands])
    b = np.array([c.size for c in pool_cands])
    table = a[None, :] + t_grid[:, None] * b[None, :]
    best = np.argmin(table, axis=1)
    profile = KProfile(
        f_id=f_id or f.name,
        p=float(p),
        t_grid=t_grid,
        k_values=table[np.arange(len(t_grid)), best],
        solver_values=np.array([value for value, _, _ in solved]),
        solver_residuals=np.array([res for _, res, _ in solved]),
        norm_p=solver.norm_p,
        norm_1p=solver.norm_1p,
        admissible=solver.admissible,
        sources=[pool_cands[i].source for i in best],
    )
    logger.debug("K-profile of %s: %d points, K(1) = %.6g", profile.f_id, len(t_grid), profile.k_values[J])
    return profile


@dataclass
class Subadditivity:
    """K(t, f + g) against K(t, f) + K(t, g) on a common t-grid."""

    names: Tuple[str, str]
    t_grid: np.ndarray
    k_sum: np.ndarray
    k_parts: np.ndarray
    tol: float

    @property
    def slack(self) -> np.ndarray:
        """Allowed excess 2·tol·max(1, K(t, f) + K(t, g))."""
        return 2.0 * self.tol * np.maximum(1.0, self.k_parts)

    @property
    def excess(self) -> float:
        return float((self.k_sum - self.k_parts).max(initial=-np.inf))

    @property
    def passed(self) -> bool:
        return bool(np.all(self.k_sum <= self.k_parts + self.slack))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "f": self.names[0],
                "g": self.names[1],
                "t": self.t_grid,
                "K_sum": self.k_sum,
                "K_parts": self.k_parts,
                "passed": self.k_sum <= self.k_parts + self.slack,
            }
        )


def subadditivity(
    f: GridFunction,
    g: GridFunction,
    p: float,
    J: Optional[int] = None,
    profiles: Optional[Tuple[KProfile, KProfile]] = None,
    space: Optional[CompetitorSpace] = None,
    quadratic: Optional[QuadraticSolver] = None,
    tol: Optional[float] = None,
) -> Subadditivity:
    """Compare the K-profile of f + g with the sum of the profiles of f and g.

    Args:
        f: Grid function on Ω
        g: Grid function on the same discretization
        p: Exponent in (1, ∞)
        J: Depth of the dyadic grid
        profiles: Precomputed K-profiles of f and g
        space: Competitor space shared by the three solves
        quadratic: Factorised quadratic solver of `space`
        tol: Solver tolerance; the excess allowed is 2·tol·max(1, K(f) + K(g))

    Returns:
        Subadditivity
    """
    J = int(resolve("k_depth", J))
    tol = float(resolve("solver_tol", tol))
    space = space or competitor_space(f.disc)
    quadratic = quadratic or QuadraticSolver(space)

    def profile(u: GridFunction) -> KProfile:
        return k_profile(u, p, J, solver=KSolver(u, p, space=space, quadratic=quadratic))

    pf, pg = profiles if profiles is not None else (profile(f), profile(g))
    if len(pf.t_grid) != len(pg.t_grid) or pf.p != p or pg.p != p:
        raise ValueError("the K-profiles of f and g do not share p and the t-grid")
    J = (len(pf.t_grid) - 1) // 2
    total = f.with_values(f.values + g.values, name=f"{f.name}+{g.name}")
    psum = profile(total)
    check = Subadditivity(
        names=(f.name, g.name),
        t_grid=pf.t_grid,
        k_sum=psum.k_values,
        k_parts=pf.k_values + pg.k_values,
        tol=tol,
    )
    if not check.passed:
        logger.warning("K(t, %s) exceeds K(t, f) + K(t, g) by %.3g", total.name, check.excess)
    return check


def _tails(profile: KProfile, s: float, J: int):
    """Envelope bounds of the sums over j < −J and j > J."""
    p = profile.p
    if profile.norm_p == 0:
        return 0.0, 0.0
    high = profile.norm_p**p * LN2 * 2.0 ** (-(J + 1) * s * p) / (1.0 - 2.0 ** (-s * p))
    if not profile.admissible:
        return np.inf, high
    low = profile.norm_1p**p * LN2 * 2.0 ** (-(J + 1) * (1 - s) * p) / (1.0 - 2.0 ** (-(1 - s) * p))
    return low, high


def interpolation_norm(
    f: GridFunction,
    s: float,
    p: float,
    J: Optional[int] = None,
    profile: Optional[KProfile] = None,
) -> NormReport:
    """Real-interpolation norm (Σ_j (t_j^{−s} K(t_j, f))^p ln 2)^{1/p} + ‖f‖_p.

    Args:
        f: Grid function on Ω
        s: Interpolation parameter in (0, 1)
        p: Exponent in (1, ∞)
        J: Depth of the dyadic grid
        profile: A precomputed K-profile of f

    Returns:
        NormReport with parts `sum`, `lp`, `tail_low` and `tail_high`; the tails
        bound the omitted j by the envelope and are infinite when f does not
        vanish on the D band
    """
    if not 0 < s < 1:
        raise ValueError(f"s must lie in (0, 1), got {s}")
    J = int(resolve("k_depth", J))
    profile = profile or k_profile(f, p, J)
    J = (len(profile.t_grid) - 1) // 2
    terms = (profile.t_grid ** (-s) * profile.k_values) ** p
    total = float(terms.sum() * LN2)
    low, high = _tails(profile, s, J)
    value = total ** (1.0 / p) + profile.norm_p
    report = NormReport(
        op="interpolation",
        value=value,
        h=f.h,
        s=s,
        p=p,
        parts={"sum": total ** (1.0 / p), "lp": profile.norm_p, "tail_low": low, "tail_high": high},
    )
    if not profile.admissible:
        report.flags.append("non-admissible")
        logger.warning("%s does not vanish near D; the interpolation norm diverges as J grows", f.name)
    return report
