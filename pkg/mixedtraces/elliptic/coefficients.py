# mixedtraces/elliptic/coefficients.py

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from mixedtraces.errors import EllipticityViolated

FIELDS = ("identity", "anisotropic", "checkerboard")
CHECKER_SIDE = 0.25
CHECKER_VALUES = (1.0, 10.0)


@dataclass(frozen=True)
class CoefficientField:
    """A bounded symmetric matrix field A(x) with a declared ellipticity constant."""

    name: str
    evaluate: Callable[[np.ndarray], np.ndarray]
    ellipticity: float

    def __call__(self, points: np.ndarray) -> np.ndarray:
        """(N, 2, 2) matrices at the points."""
        return self.evaluate(np.atleast_2d(points))


def _constant(matrix):
    m = np.asarray(matrix, dtype=float)
    return lambda pts: np.broadcast_to(m, (len(pts), 2, 2)).copy()


def _checkerboard(pts: np.ndarray) -> np.ndarray:
    parity = (np.floor(pts[:, 0] / CHECKER_SIDE) + np.floor(pts[:, 1] / CHECKER_SIDE)).astype(np.int64) % 2
    lam = np.where(parity == 0, CHECKER_VALUES[0], CHECKER_VALUES[1])
    out = np.zeros((len(pts), 2, 2))
    out[:, 0, 0] = lam
    out[:, 1, 1] = lam
    return out


def coefficient_field(name: str) -> CoefficientField:
    """One of the shipped coefficient fields.

    Args:
        name: "identity", "anisotropic" (diag(1, 4)) or "checkerboard"
            (1 and 10 on alternating squares of side 1/4)

    Returns:
        CoefficientField
    """
    if name == "identity":
        return CoefficientField(name, _constant(np.eye(2)), 1.0)
    if name == "anisotropic":
        return CoefficientField(name, _constant(np.diag([1.0, 4.0])), 1.0)
    if name == "checkerboard":
        return CoefficientField(name, _checkerboard, CHECKER_VALUES[0])
    raise ValueError(f"Unsupported coefficient field: {name}")


def resolve_field(field: Union[str, CoefficientField]) -> CoefficientField:
    return coefficient_field(field) if isinstance(field, str) else field


def check_ellipticity(A: CoefficientField, values: np.ndarray, atol: float = 1e-12) -> float:
    """Smallest eigenvalue of A over the sampled cells; raises when A is not
    symmetric or falls below its declared constant."""
    if not np.allclose(values, np.swapaxes(values, 1, 2), atol=atol, rtol=0.0):
        raise EllipticityViolated(f"{A.name}: A(x) is not symmetric")
    lowest = float(np.linalg.eigvalsh(values).min(initial=np.inf)) if len(values) else np.inf
    if not lowest >= A.ellipticity - atol or not A.ellipticity > 0:
        raise EllipticityViolated(f"{A.name}: A(x)ξ·ξ ≥ {A.ellipticity:g}|ξ|² fails (smallest eigenvalue {lowest:.4g})")
    return lowest
