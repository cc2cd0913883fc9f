# mixedtraces/extension/omega_d.py

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from mixedtraces.dataflows.config import resolve
from mixedtraces.errors import EmptyD
from mixedtraces.geometry.regularity import sample_along

from .grid_function import GridFunction

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class OmegaDSamples:
    """Zero extension of f to Ω_D = (Ω × {0}) ∪ (D × ℝ).

    The slice carries f at interior cell centers with weight h². The wing is an
    arclength × height lattice over D × [−R_w, R_w] with value 0 and the product
    weight |D|·2R_w / (arc cells · height cells).
    """

    f: GridFunction
    slice_points: np.ndarray
    slice_values: np.ndarray
    slice_weight: float
    wing_points: np.ndarray
    wing_heights: np.ndarray
    wing_values: np.ndarray
    wing_weight: float
    wing_radius: float
    d_length: float

    @property
    def arc_step(self) -> float:
        return self.d_length / len(self.wing_points)

    def mass(self, p: float) -> float:
        """∫_{Ω_D} |F|^p dH²."""
        return float(
            (np.abs(self.slice_values) ** p).sum() * self.slice_weight
            + (np.abs(self.wing_values) ** p).sum() * self.wing_weight
        )


def zero_extend_omega_d(
    f: GridFunction,
    wing_radius: Optional[float] = None,
    wing_cells: Optional[int] = None,
) -> OmegaDSamples:
    """Extend f by zero from the slice Ω × {0} to the wing D × ℝ.

    Args:
        f: Grid function on Ω of a domain with nonempty D
        wing_radius: Truncation height R_w of the wing
        wing_cells: Number of height cells over [−R_w, R_w]

    Returns:
        OmegaDSamples
    """
    domain = f.disc.domain
    if not domain.has_d:
        raise EmptyD(f"{domain.name}: D is empty", operation="zero_extend_omega_d")
    radius = float(resolve("wing_radius", wing_radius))
    cells = int(resolve("wing_cells", wing_cells))
    h = f.h
    d_len = float(domain.d_set.length)
    arc_cells = max(int(np.ceil(d_len / h)), 1)
    arc = sample_along(domain.d_set, arc_cells)
    heights = -radius + (np.arange(cells) + 0.5) * (2 * radius / cells)
    interior = f.disc.interior
    samples = OmegaDSamples(
        f=f,
        slice_points=f.disc.centers[interior],
        slice_values=f.flat[interior].copy(),
        slice_weight=h * h,
        wing_points=arc,
        wing_heights=heights,
        wing_values=np.zeros(len(arc) * cells),
        wing_weight=d_len * 2 * radius / (len(arc) * cells),
        wing_radius=radius,
        d_length=d_len,
    )
    logger.debug("Ω_D samples for %s: %d slice, %d×%d wing", f.name, interior.sum(), len(arc), cells)
    return samples
