# mixedtraces/whitney/classes.py

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np
import pandas as pd
import shapely

from mixedtraces.dataflows.config import resolve
from mixedtraces.errors import InvalidParameters
from mixedtraces.geometry.domain import DomainModel

from .decomposition import WhitneyDecomposition, whitney_decompose

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class CubeClasses:
    """Interior shadow w_i and the exterior families w_e ⊇ w_e′ ⊇ w_e″.

    w_i is a mask over dec_gamma (Whitney cubes of the complement of closure Γ),
    the exterior families are masks over dec_omega (Whitney cubes of the
    complement of closure Ω).
    """

    domain: DomainModel
    dec_gamma: Optional[WhitneyDecomposition]
    dec_omega: WhitneyDecomposition
    A: float
    B: float
    w_i: np.ndarray
    w_e: np.ndarray
    w_e_prime: np.ndarray
    w_e_dprime: np.ndarray
    dist_d: np.ndarray
    dist_gamma: np.ndarray

    @property
    def delta(self) -> float:
        return self.domain.delta

    @cached_property
    def interior_index(self) -> np.ndarray:
        return np.flatnonzero(self.w_i)

    @cached_property
    def exterior_index(self) -> np.ndarray:
        return np.flatnonzero(self.w_e)

    @cached_property
    def interior_graph(self):
        """Touching graph restricted to w_i, indexed like interior_index."""
        idx = self.interior_index
        return self.dec_gamma.neighbor_graph[idx][:, idx]

    @cached_property
    def gamma_tree(self) -> shapely.STRtree:
        return shapely.STRtree(self.dec_gamma.boxes)

    def counts(self) -> dict:
        return {
            "w_i": int(self.w_i.sum()),
            "w_e": int(self.w_e.sum()),
            "w_e_prime": int(self.w_e_prime.sum()),
            "w_e_dprime": int(self.w_e_dprime.sum()),
        }

    def interior_frame(self) -> pd.DataFrame:
        if self.dec_gamma is None:
            return pd.DataFrame(columns=["level", "ix", "iy", "side", "w_i"])
        return self.dec_gamma.to_frame({"w_i": self.w_i})

    def exterior_frame(self) -> pd.DataFrame:
        return self.dec_omega.to_frame(
            {"w_e": self.w_e, "w_e_prime": self.w_e_prime, "w_e_dprime": self.w_e_dprime}
        )


def _inner_layer(dec: WhitneyDecomposition, members: np.ndarray) -> np.ndarray:
    """Members all of whose touching cubes are members."""
    graph = dec.neighbor_graph
    outside = (~members).astype(np.int64)
    touching_outside = graph.astype(np.int64) @ outside
    return members & (touching_outside == 0)


def _meets_domain(dec: WhitneyDecomposition, domain: DomainModel) -> np.ndarray:
    """Q ∩ Ω ≠ ∅, decided by exact polygon clipping of each closed cube."""
    hits = shapely.intersects(dec.boxes, domain.polygon)
    out = np.zeros(len(dec), dtype=bool)
    idx = np.flatnonzero(hits)
    if len(idx):
        area = shapely.area(shapely.intersection(dec.boxes[idx], domain.polygon))
        out[idx] = area > 1e-12 * dec.side[idx] ** 2
    return out


def classify_cubes(
    dec_gamma: Optional[WhitneyDecomposition],
    dec_omega: WhitneyDecomposition,
    domain: DomainModel,
    A: Optional[float] = None,
    B: Optional[float] = None,
) -> CubeClasses:
    """Split Whitney cubes into the interior shadow and the exterior cone families.

    Args:
        dec_gamma: Whitney decomposition of the complement of closure Γ, None when Γ = ∅
        dec_omega: Whitney decomposition of the complement of closure Ω
        domain: The domain model
        A: Size truncation, w_e keeps ℓ(Q) ≤ Aδ
        B: Cone aperture, w_e keeps dist(Q, Γ) < B·dist(Q, D); must exceed 2

    Returns:
        CubeClasses
    """
    A = float(resolve("whitney_A", A))
    B = float(resolve("whitney_B", B))
    if not A > 0:
        raise InvalidParameters(f"A must be positive, got {A}")
    if not B > 2:
        raise InvalidParameters(f"B must exceed 2, got {B}")
    if dec_gamma is not None and dec_gamma.window != dec_omega.window:
        raise InvalidParameters("decompositions were computed over different windows")

    if dec_gamma is None or not domain.has_gamma:
        w_i = np.zeros(0 if dec_gamma is None else len(dec_gamma), dtype=bool)
    else:
        w_i = _meets_domain(dec_gamma, domain)

    boxes = dec_omega.boxes
    dist_d = shapely.distance(boxes, domain.d_set) if domain.has_d else np.full(len(dec_omega), np.inf)
    dist_g = shapely.distance(boxes, domain.gamma_set) if domain.has_gamma else np.full(len(dec_omega), np.inf)
    # Strict inequality with dist(Q, ∅) = +inf: Γ = ∅ empties w_e, D = ∅ keeps every small cube.
    with np.errstate(invalid="ignore"):
        cone = dist_g < B * dist_d
    w_e = (dec_omega.side <= A * domain.delta) & cone
    w_e_prime = _inner_layer(dec_omega, w_e)
    w_e_dprime = _inner_layer(dec_omega, w_e_prime)

    classes = CubeClasses(
        domain=domain,
        dec_gamma=dec_gamma,
        dec_omega=dec_omega,
        A=A,
        B=B,
        w_i=w_i,
        w_e=w_e,
        w_e_prime=w_e_prime,
        w_e_dprime=w_e_dprime,
        dist_d=dist_d,
        dist_gamma=dist_g,
    )
    if not domain.has_gamma:
        logger.warning(
            "%s: Γ = ∅, so w_e is empty under the literal cone condition; E_D is the zero extension",
            domain.name,
        )
    logger.info("Classified cubes on %s: %s", domain.name, classes.counts())
    return classes


def decompose_domain(
    domain: DomainModel,
    max_level: Optional[int] = None,
    A: Optional[float] = None,
    B: Optional[float] = None,
) -> CubeClasses:
    """Decompose both complements over the domain window and classify."""
    dec_gamma = None
    if domain.has_gamma:
        dec_gamma = whitney_decompose(domain.gamma_set, domain.window, max_level, closed_set_id="closure(Γ)")
    dec_omega = whitney_decompose(domain.polygon, domain.window, max_level, closed_set_id="closure(Ω)")
    return classify_cubes(dec_gamma, dec_omega, domain, A=A, B=B)
