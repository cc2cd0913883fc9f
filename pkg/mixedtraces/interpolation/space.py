# mixedtraces/interpolation/space.py

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Tuple

import numpy as np
from scipy import linalg, sparse
from scipy.sparse import linalg as splinalg

from mixedtraces.dataflows.config import resolve
from mixedtraces.extension.grid_function import Discretization, GridFunction

logger = logging.getLogger(__name__)

_BAND_SLACK = 1.0 - 1e-9


@dataclass(eq=False)
class CompetitorSpace:
    """Discrete W̊_D^{1,p}(Ω): grid functions on the interior cells that vanish on
    every cell closer than h to D.

    Vectors are indexed by `cells` (the interior cells, ascending). Gradients
    are face differences across the open faces between interior cells, so
    ‖∇g‖_p^p = Σ_faces |Δg / h|^p h².
    """

    disc: Discretization
    cells: np.ndarray
    free: np.ndarray
    diff: sparse.csr_matrix

    @property
    def h(self) -> float:
        return self.disc.h

    @property
    def n_free(self) -> int:
        return int(self.free.sum())

    def lp(self, x: np.ndarray, p: float) -> float:
        return float(((np.abs(x) ** p).sum() * self.h**2) ** (1.0 / p))

    def grad_lp(self, x: np.ndarray, p: float) -> float:
        return self.lp(self.diff @ x, p)

    def w1p(self, x: np.ndarray, p: float) -> float:
        """‖g‖_p + ‖∇g‖_p."""
        return self.lp(x, p) + self.grad_lp(x, p)

    def restrict(self, f: GridFunction) -> np.ndarray:
        if f.disc is not self.disc:
            raise ValueError("grid function lives on another discretization")
        return f.flat[self.cells].copy()

    def lift(self, x: np.ndarray, name: str = "g") -> GridFunction:
        out = np.zeros(self.disc.grid.size)
        out[self.cells] = x
        return GridFunction(self.disc, out, name=name)

    def embed(self, x_free: np.ndarray) -> np.ndarray:
        """Vector over `cells` from values on the free cells, zero on the D band."""
        out = np.zeros(len(self.cells))
        out[self.free] = x_free
        return out

    def admissible(self, x: np.ndarray) -> bool:
        return not np.any(x[~self.free])

    @cached_property
    def diff_free(self) -> sparse.csr_matrix:
        return self.diff[:, np.flatnonzero(self.free)].tocsr()

    @cached_property
    def stiffness(self) -> sparse.csr_matrix:
        """M = ∇ᵀ∇ restricted to the free cells (units 1/h²)."""
        d = self.diff_free
        return (d.T @ d).tocsr()


def competitor_space(disc: Discretization) -> CompetitorSpace:
    """Build the competitor space of a discretization.

    Args:
        disc: Grid over the domain

    Returns:
        CompetitorSpace
    """
    cells = np.flatnonzero(disc.interior)
    free = disc.dist_d[cells] >= disc.h * _BAND_SLACK
    position = np.full(disc.grid.size, -1, dtype=np.int64)
    position[cells] = np.arange(len(cells))

    faces = disc.faces
    live = faces.open
    a = position[faces.a[live]]
    b = position[faces.b[live]]
    m = len(a)
    rows = np.repeat(np.arange(m), 2)
    cols = np.stack([b, a], axis=1).ravel()
    vals = np.tile([1.0, -1.0], m) / disc.h
    diff = sparse.csr_matrix((vals, (rows, cols)), shape=(m, len(cells)))
    space = CompetitorSpace(disc=disc, cells=cells, free=free, diff=diff)
    logger.debug(
        "Competitor space on %s: %d interior cells, %d free, %d faces",
        disc.domain.name,
        len(cells),
        space.n_free,
        m,
    )
    return space


class QuadraticSolver:
    """Minimiser of ‖f − g‖₂² + λ(‖g‖₂² + ‖∇g‖₂²) over the competitor space.

    The normal equations ((1 + λ) I + λ M) g = f on the free cells are solved
    through a dense eigendecomposition of M when it fits the dense budget, and
    through a sparse LU factorisation per λ otherwise.
    """

    def __init__(self, space: CompetitorSpace, dense_limit: Optional[int] = None):
        self.space = space
        self.dense_limit = int(resolve("dense_eig_limit", dense_limit))
        self._eig: Optional[Tuple[np.ndarray, np.ndarray]] = None
        if 0 < space.n_free <= self.dense_limit:
            lam, vec = linalg.eigh(space.stiffness.toarray())
            self._eig = (np.clip(lam, 0.0, None), vec)

    @property
    def dense(self) -> bool:
        return self._eig is not None

    def solve(self, f_free: np.ndarray, lam: float) -> np.ndarray:
        if self.space.n_free == 0:
            return np.zeros(0)
        if self._eig is not None:
            eigvals, vec = self._eig
            return vec @ ((vec.T @ f_free) / (1.0 + lam + lam * eigvals))
        n = self.space.n_free
        system = (1.0 + lam) * sparse.identity(n, format="csc") + lam * self.space.stiffness.tocsc()
        return splinalg.splu(system).solve(f_free)
