# mixedtraces/elliptic/spectrum.py

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
import pandas as pd
from scipy import linalg, sparse

from mixedtraces.dataflows.config import resolve
from mixedtraces.errors import DimensionBudgetExceeded
from mixedtraces.extension.grid_function import GridFunction

from .operator import OperatorMatrix

logger = logging.getLogger(__name__)

EXPORT_MODES = 64


@dataclass(eq=False)
class Spectrum:
    """Full eigendecomposition L = V diag(λ) Vᵀ with ascending λ ≥ 0."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residuals: np.ndarray
    norm: float
    operator: Optional[OperatorMatrix] = None

    @property
    def dimension(self) -> int:
        return len(self.eigenvalues)

    def orthonormality_error(self) -> float:
        V = self.eigenvectors
        return float(np.abs(V.T @ V - np.eye(self.dimension)).max(initial=0.0))

    @property
    def verified(self) -> bool:
        return self.orthonormality_error() <= 1e-10 and float(self.residuals.max(initial=0.0)) <= 1e-8 * max(self.norm, 1.0)

    def vector(self, f: Union[GridFunction, np.ndarray]) -> np.ndarray:
        if isinstance(f, GridFunction):
            if self.operator is None:
                raise ValueError("a grid function needs a spectrum built from an OperatorMatrix")
            return self.operator.restrict(f)
        return np.asarray(f, dtype=float)

    def apply(self, fn: Callable[[np.ndarray], np.ndarray], f: Union[GridFunction, np.ndarray]) -> np.ndarray:
        """V diag(fn(λ)) Vᵀ f on free-node vectors."""
        V = self.eigenvectors
        return V @ (fn(self.eigenvalues) * (V.T @ self.vector(f)))

    def reconstruct(self) -> np.ndarray:
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.T

    def to_frame(self, modes: int = EXPORT_MODES) -> pd.DataFrame:
        k = min(modes, self.dimension)
        return pd.DataFrame(
            {
                "mode": np.arange(k),
                "eigenvalue": self.eigenvalues[:k],
                "residual": self.residuals[:k],
            }
        )


def spectral_decompose(L: Union[OperatorMatrix, np.ndarray, sparse.spmatrix], limit: Optional[int] = None) -> Spectrum:
    """Dense symmetric eigendecomposition of L_D.

    Args:
        L: Operator matrix, or a symmetric matrix
        limit: Largest dimension accepted

    Returns:
        Spectrum with per-pair residuals ‖Lv − λv‖

    Raises:
        DimensionBudgetExceeded
    """
    limit = int(resolve("dense_eig_limit", limit))
    operator = L if isinstance(L, OperatorMatrix) else None
    matrix = L.matrix if operator is not None else L
    dense = matrix.toarray() if sparse.issparse(matrix) else np.asarray(matrix, dtype=float)
    n = dense.shape[0]
    if n > limit:
        raise DimensionBudgetExceeded(f"dimension {n} exceeds the dense eigensolve budget {limit}")
    lam, V = linalg.eigh(dense)
    residuals = np.linalg.norm(dense @ V - V * lam, axis=0)
    norm = float(np.abs(lam).max(initial=0.0))
    # rounding leaves kernel eigenvalues of either sign near zero
    lam = np.where(lam < 1e-12 * norm, 0.0, lam)
    spec = Spectrum(eigenvalues=lam, eigenvectors=V, residuals=residuals, norm=norm, operator=operator)
    logger.info(
        "Spectrum of dimension %d: λ₀ = %.6g, λ_max = %.6g, max residual %.2g",
        n,
        lam[0] if n else np.nan,
        lam[-1] if n else np.nan,
        float(residuals.max(initial=0.0)),
    )
    return spec


def fractional_power_apply(
    spec: Spectrum,
    order: float,
    f: Union[GridFunction, np.ndarray],
) -> Union[GridFunction, np.ndarray]:
    """L^{order} f = V diag(λ^{order}) Vᵀ f for order ∈ (0, 1/2].

    Args:
        spec: Spectrum of L_D
        order: s/2
        f: Grid function (restricted to the free nodes) or free-node vector

    Returns:
        Same kind as `f`
    """
    if not 0 < order <= 0.5:
        raise ValueError(f"order must lie in (0, 1/2], got {order}")
    out = spec.apply(lambda lam: lam**order, f)
    if isinstance(f, GridFunction):
        return spec.operator.lift(out, name=f"L^{order:g} {f.name}")
    return out


def heat_apply(spec: Spectrum, t: float, f: Union[GridFunction, np.ndarray]) -> np.ndarray:
    """e^{−tL} f on free-node vectors."""
    return spec.apply(lambda lam: np.exp(-t * lam), f)
