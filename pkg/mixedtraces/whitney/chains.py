# mixedtraces/whitney/chains.py

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import pandas as pd
from scipy.sparse import csgraph

from mixedtraces.dataflows.config import resolve
from mixedtraces.errors import ChainNotFound

from .audit import ReplayResult
from .classes import CubeClasses

logger = logging.getLogger(__name__)


@dataclass
class TouchingChain:
    """A chain of touching interior cubes, as indices into dec_gamma."""

    cubes: List[int]
    case: str
    bound: Optional[int] = None
    sides: List[float] = field(default_factory=list)

    @property
    def length(self) -> int:
        return len(self.cubes)

    @property
    def within_bound(self) -> bool:
        return self.bound is None or self.length <= self.bound

    @property
    def comparable(self) -> bool:
        """Consecutive cubes have side ratio in [1/4, 4]."""
        s = np.asarray(self.sides)
        if len(s) < 2:
            return True
        ratio = s[1:] / s[:-1]
        return bool(np.all((ratio >= 0.25) & (ratio <= 4.0)))


def _bfs_path(classes: CubeClasses, source: int, targets: np.ndarray) -> Optional[List[int]]:
    """Shortest unweighted path in w_i from source to the nearest target (dec_gamma indices)."""
    idx = classes.interior_index
    if len(idx) == 0:
        return None

    def local(g):
        pos = np.searchsorted(idx, g)
        pos = np.clip(pos, 0, len(idx) - 1)
        return pos, idx[pos] == g

    src, ok = local(np.array([source]))
    if not ok[0]:
        return None
    tpos, tok = local(np.asarray(targets, dtype=np.int64))
    tpos = tpos[tok]
    if len(tpos) == 0:
        return None
    start = int(src[0])
    dist, pred = csgraph.shortest_path(
        classes.interior_graph, unweighted=True, directed=False, indices=start, return_predecessors=True
    )
    reach = [int(t) for t in tpos if np.isfinite(dist[t])]
    if not reach:
        return None
    # nearest target, ties by canonical index
    end = min(reach, key=lambda t: (dist[t], t))
    path = [end]
    while path[-1] != start:
        path.append(int(pred[path[-1]]))
    return [int(idx[i]) for i in reversed(path)]


def _overlapping_comparable(classes: CubeClasses, q: int, band: float) -> np.ndarray:
    """Interior cubes S whose dyadic intersection with Q has side ≥ ℓ(Q)/band; S may be larger than Q."""
    dec_o, dec_g = classes.dec_omega, classes.dec_gamma
    cand = classes.gamma_tree.query(dec_o.boxes[q], predicate="intersects")
    cand = cand[classes.w_i[cand]]
    lo = np.maximum(dec_g.lower[cand], dec_o.lower[q])
    hi = np.minimum(dec_g.upper[cand], dec_o.upper[q])
    overlap = np.all(hi > lo, axis=1)
    ratio = dec_g.side[cand] / dec_o.side[q]
    keep = overlap & (ratio >= 1.0 / band)
    return np.sort(cand[keep])


def touching_chain(
    P: Optional[int],
    Q: int,
    classes: CubeClasses,
    reflection,
    bound: Optional[int] = None,
    size_band: Optional[float] = None,
) -> TouchingChain:
    """Breadth-first touching chain in w_i between reflected cubes.

    Case (i): P, Q ∈ w_e touching (or equal), chain from P* to Q*.
    Case (ii): P is None and Q ∈ w_e ∖ w_e′, chain from Q* to a cube S ∈ w_i
    whose intersection with Q is a dyadic cube of size comparable to Q.

    Args:
        P: dec_omega index of the first cube, or None for case (ii)
        Q: dec_omega index of the second cube
        classes: Cube classes
        reflection: ReflectionMap built from `classes`
        bound: Chain-length bound m to compare against
        size_band: Comparability band for case (ii) targets

    Returns:
        TouchingChain

    Raises:
        ChainNotFound: no chain exists at the current depth
    """
    band = float(resolve("size_band", size_band))
    partner = reflection.partner
    dec_g = classes.dec_gamma
    q_star = int(partner[Q]) if Q < len(partner) else -1
    if q_star < 0:
        raise ChainNotFound(f"cube {Q} has no reflected partner")

    if P is not None:
        p_star = int(partner[P])
        if p_star < 0:
            raise ChainNotFound(f"cube {P} has no reflected partner")
        if P == Q or p_star == q_star:
            path = [q_star]
        else:
            path = _bfs_path(classes, p_star, np.array([q_star]))
        case = "touching"
    else:
        targets = _overlapping_comparable(classes, Q, band)
        path = _bfs_path(classes, q_star, targets) if len(targets) else None
        case = "boundary-layer"

    if path is None:
        raise ChainNotFound(f"no touching chain for cube {Q} ({case}) at level {classes.dec_omega.max_level}")
    return TouchingChain(cubes=path, case=case, bound=bound, sides=[float(dec_g.side[i]) for i in path])


@dataclass
class ChainSweep:
    """Touching chains over a deterministic sample of w_e cubes, one row per chain."""

    chains: pd.DataFrame
    bound: Optional[int] = None

    @property
    def checked(self) -> int:
        return len(self.chains)

    @property
    def missing(self) -> int:
        return int((~self.chains["found"]).sum())

    @property
    def incomparable(self) -> int:
        return int((self.chains["found"] & ~self.chains["comparable"]).sum())

    @property
    def max_length(self) -> int:
        return int(self.chains["length"].max()) if len(self.chains) else 0

    @property
    def over_bound(self) -> int:
        if self.bound is None:
            return 0
        return int((self.chains["found"] & (self.chains["length"] > self.bound)).sum())

    def summary(self) -> pd.DataFrame:
        """Per case: chains checked, missing, incomparable and the length range."""
        rows = []
        for case in ("touching", "boundary-layer"):
            part = self.chains[self.chains["case"] == case]
            found = part[part["found"]]
            rows.append(
                {
                    "case": case,
                    "checked": len(part),
                    "missing": len(part) - len(found),
                    "incomparable": int((~found["comparable"]).sum()),
                    "max_length": int(found["length"].max()) if len(found) else 0,
                    "mean_length": float(found["length"].mean()) if len(found) else 0.0,
                    "bound": self.bound,
                }
            )
        return pd.DataFrame(rows)

    def as_replay(self) -> ReplayResult:
        return ReplayResult(
            "touching_chains",
            self.checked,
            self.missing + self.incomparable,
            float(self.max_length),
            details={"missing": self.missing, "incomparable": self.incomparable, "over_bound": self.over_bound},
        )


def _spread(items: np.ndarray, limit: int) -> np.ndarray:
    if len(items) > limit:
        items = items[np.linspace(0, len(items) - 1, limit).round().astype(int)]
    return items


def chain_sweep(
    classes: CubeClasses,
    reflection,
    limit: Optional[int] = None,
    bound: Optional[int] = None,
    size_band: Optional[float] = None,
) -> ChainSweep:
    """Touching chains for touching paired pairs of w_e (case (i)) and for paired Q ∈ w_e ∖ w_e′ with
    diam Q ≤ Aδ/4 (case (ii)).

    Each case is sampled evenly in canonical order down to `limit` items; a
    missing chain is recorded, not raised.

    Args:
        classes: Cube classes
        reflection: ReflectionMap built from `classes`
        limit: Items per case
        bound: Chain-length bound m
        size_band: Comparability band for case (ii) targets

    Returns:
        ChainSweep
    """
    limit = int(resolve("replay_samples", limit))
    bound = resolve("chain_bound", bound)
    bound = None if bound is None else int(bound)
    partner = reflection.partner
    paired = partner >= 0

    coo = classes.dec_omega.neighbor_graph.tocoo()
    keep = classes.w_e[coo.row] & classes.w_e[coo.col] & paired[coo.row] & paired[coo.col] & (coo.row < coo.col)
    pairs = np.stack([coo.row[keep], coo.col[keep]], axis=1)
    if len(pairs):
        pairs = _spread(pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))], limit)
    small = classes.dec_omega.diam <= classes.A * classes.delta / 4
    layer = _spread(np.flatnonzero(classes.w_e & ~classes.w_e_prime & small & paired), limit)

    rows = []
    for P, Q in [(int(a), int(b)) for a, b in pairs] + [(None, int(q)) for q in layer]:
        try:
            chain = touching_chain(P, Q, classes, reflection, bound=bound, size_band=size_band)
            rows.append({"case": chain.case, "P": P, "Q": Q, "found": True, "length": chain.length, "comparable": chain.comparable})
        except ChainNotFound:
            case = "touching" if P is not None else "boundary-layer"
            rows.append({"case": case, "P": P, "Q": Q, "found": False, "length": 0, "comparable": False})
    frame = pd.DataFrame(rows, columns=["case", "P", "Q", "found", "length", "comparable"])
    frame = frame.astype({"found": bool, "comparable": bool, "length": np.int64})
    sweep = ChainSweep(chains=frame, bound=bound)
    logger.info(
        "%s: %d touching chains, max length %d, %d missing, %d incomparable",
        classes.domain.name,
        sweep.checked,
        sweep.max_length,
        sweep.missing,
        sweep.incomparable,
    )
    return sweep
