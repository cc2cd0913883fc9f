# mixedtraces/reflection/pairing.py

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np
import pandas as pd
from scipy.spatial import cKDTree

from mixedtraces.dataflows.config import resolve
from mixedtraces.errors import EmptyInteriorClass
from mixedtraces.whitney.classes import CubeClasses
from mixedtraces.whitney.cubes import box_gap

logger = logging.getLogger(__name__)

# Candidates per level used to seed the exact radius search.
_SEED_NEIGHBORS = 4


@dataclass(eq=False)
class ReflectionMap:
    """Pairing Q ↦ Q* from exterior cubes (dec_omega) to interior cubes (dec_gamma).

    `partner[q]` is the dec_gamma index of Q* for q ∈ w_e, -1 otherwise.
    """

    classes: CubeClasses
    size_band: float
    partner: np.ndarray
    gap: np.ndarray
    unpaired: np.ndarray
    diag: Dict[str, float] = field(default_factory=dict)

    @property
    def paired(self) -> np.ndarray:
        return np.flatnonzero(self.partner >= 0)

    def __len__(self) -> int:
        return int((self.partner >= 0).sum())

    def to_frame(self) -> pd.DataFrame:
        dec_o, dec_g = self.classes.dec_omega, self.classes.dec_gamma
        q = self.paired
        s = self.partner[q]
        frame = pd.DataFrame(
            {
                "level": dec_o.level[q],
                "ix": dec_o.ix[q],
                "iy": dec_o.iy[q],
                "star_level": dec_g.level[s] if dec_g is not None else [],
                "star_ix": dec_g.ix[s] if dec_g is not None else [],
                "star_iy": dec_g.iy[s] if dec_g is not None else [],
                "distance": self.gap[q],
                "diam_ratio": dec_g.side[s] / dec_o.side[q] if dec_g is not None else [],
            }
        )
        return frame


def reflection_constants(classes: CubeClasses, partner: np.ndarray) -> Dict[str, float]:
    """C_size, C_dist, M and C_neighbor of a pairing."""
    dec_o, dec_g = classes.dec_omega, classes.dec_gamma
    q = np.flatnonzero(partner >= 0)
    if len(q) == 0:
        return {"C_size": 1.0, "C_dist": 0.0, "M": 0, "C_neighbor": 0.0}
    s = partner[q]
    ratio = dec_g.side[s] / dec_o.side[q]
    gap = box_gap(dec_o.lower[q], dec_o.upper[q], dec_g.lower[s], dec_g.upper[s])

    graph = dec_o.neighbor_graph.tocoo()
    both = (partner[graph.row] >= 0) & (partner[graph.col] >= 0)
    a, b = graph.row[both], graph.col[both]
    c_nb = 0.0
    if len(a):
        pa, pb = partner[a], partner[b]
        star_gap = box_gap(dec_g.lower[pa], dec_g.upper[pa], dec_g.lower[pb], dec_g.upper[pb])
        c_nb = float((star_gap / dec_o.diam[a]).max())
    return {
        "C_size": float(np.maximum(ratio, 1.0 / ratio).max()),
        "C_dist": float((gap / dec_o.diam[q]).max()),
        "M": int(np.bincount(s).max()),
        "C_neighbor": c_nb,
    }


def build_reflection(classes: CubeClasses, size_band: Optional[float] = None) -> ReflectionMap:
    """Pair every Q ∈ w_e with the nearest comparable cube Q* ∈ w_i.

    Comparable means diam Q*/diam Q ∈ [1/C₀, C₀]. Ties in dist(Q, Q*) go to the
    smaller |log diam ratio|, then to the canonical (level, ix, iy) order.

    Args:
        classes: Cube classes
        size_band: C₀ ≥ 4

    Returns:
        ReflectionMap with measured constants in `diag`
    """
    band = float(resolve("size_band", size_band))
    if band < 4:
        raise ValueError(f"size band must be at least 4, got {band}")
    dec_o, dec_g = classes.dec_omega, classes.dec_gamma
    n_o = len(dec_o)
    partner = np.full(n_o, -1, dtype=np.int64)
    gap_out = np.full(n_o, np.nan)
    we = classes.exterior_index
    wi = classes.interior_index

    if len(we) == 0:
        return ReflectionMap(classes, band, partner, gap_out, np.zeros(0, dtype=np.int64), reflection_constants(classes, partner))
    if len(wi) == 0:
        raise EmptyInteriorClass(f"{classes.domain.name}: w_e has {len(we)} cubes but w_i is empty")

    span = int(np.floor(np.log2(band) + 1e-12))
    q_center = dec_o.centers[we]
    q_level = dec_o.level[we]
    q_half_diag = dec_o.diam[we] / 2
    best = np.full(len(we), np.inf)

    groups = []
    for lvl in np.unique(dec_g.level[wi]):
        members = wi[dec_g.level[wi] == lvl]
        eligible = np.flatnonzero(np.abs(q_level - lvl) <= span)
        if len(eligible) == 0:
            continue
        groups.append((lvl, members, cKDTree(dec_g.centers[members]), eligible))

    for lvl, members, tree, eligible in groups:
        k = min(_SEED_NEIGHBORS, len(members))
        _, j = tree.query(q_center[eligible], k=k)
        j = j.reshape(len(eligible), k)
        cand = members[j]
        qi = we[eligible]
        g = box_gap(
            dec_o.lower[qi][:, None, :],
            dec_o.upper[qi][:, None, :],
            dec_g.lower[cand],
            dec_g.upper[cand],
        )
        best[eligible] = np.minimum(best[eligible], g.min(axis=1))

    rows, cols = [], []
    for lvl, members, tree, eligible in groups:
        s_half_diag = dec_g.diam[members[0]] / 2
        radius = best[eligible] + q_half_diag[eligible] + s_half_diag
        radius = radius * (1 + 1e-12) + 1e-12
        lists = tree.query_ball_point(q_center[eligible], r=radius)
        lengths = np.fromiter((len(l) for l in lists), dtype=np.int64, count=len(lists))
        if lengths.sum() == 0:
            continue
        rows.append(np.repeat(eligible, lengths))
        cols.append(members[np.concatenate([np.asarray(l, dtype=np.int64) for l in lists if len(l)])])

    if rows:
        r = np.concatenate(rows)
        c = np.concatenate(cols)
        qi = we[r]
        gap = box_gap(dec_o.lower[qi], dec_o.upper[qi], dec_g.lower[c], dec_g.upper[c])
        logratio = np.abs(dec_g.level[c] - dec_o.level[qi])
        order = np.lexsort((dec_g.keys[c], logratio, gap, r))
        r_sorted = r[order]
        first = order[np.r_[True, r_sorted[1:] != r_sorted[:-1]]]
        partner[we[r[first]]] = c[first]
        gap_out[we[r[first]]] = gap[first]

    unpaired = we[partner[we] < 0]
    diag = reflection_constants(classes, partner)
    if len(unpaired):
        logger.warning("%s: %d exterior cubes have no comparable partner", classes.domain.name, len(unpaired))
    logger.info("Reflection on %s: %d pairs, constants %s", classes.domain.name, len(we) - len(unpaired), diag)
    return ReflectionMap(classes, band, partner, gap_out, unpaired, diag)
