# mixedtraces/elliptic/operator.py

import logging
from dataclasses import dataclass
from enum import IntEnum
from typing import Optional, Union

import numpy as np
import pandas as pd
from scipy import sparse

from mixedtraces.errors import ResolutionTooCoarse
from mixedtraces.extension.grid_function import Discretization, FaceKind, GridFunction, discretize
from mixedtraces.geometry.domain import DomainModel
from mixedtraces.geometry.regularity import segments_of

from .coefficients import CoefficientField, check_ellipticity, resolve_field

logger = logging.getLogger(__name__)

_ELIMINATE_SLACK = 1.0 - 1e-9
CELLS_ACROSS = 4


class NodeTag(IntEnum):
    FREE = 0
    D_ELIMINATED = 1
    GAMMA_NATURAL = 2


@dataclass(eq=False)
class OperatorMatrix:
    """L_D on the free nodes of a discretization.

    `matrix` is L = K/h², K the face sum of the form, so that
    h²·uᵀLu = Σ_faces c_f (Δu)² ≈ ∫ A∇u·∇u.
    """

    disc: Discretization
    matrix: sparse.csr_matrix
    node_map: np.ndarray
    boundary_tags: np.ndarray
    coefficient_field: CoefficientField
    ellipticity: float

    @property
    def dimension(self) -> int:
        return len(self.node_map)

    @property
    def h(self) -> float:
        return self.disc.h

    def restrict(self, f: GridFunction) -> np.ndarray:
        if f.disc is not self.disc:
            raise ValueError("grid function lives on another discretization")
        return f.flat[self.node_map].copy()

    def lift(self, x: np.ndarray, name: str = "u") -> GridFunction:
        out = np.zeros(self.disc.grid.size)
        out[self.node_map] = x
        return GridFunction(self.disc, out, name=name)

    def form(self, u: np.ndarray, v: Optional[np.ndarray] = None) -> float:
        """a(u, v) = h²·uᵀLv on free-node vectors."""
        v = u if v is None else v
        return float(self.h**2 * (u @ (self.matrix @ v)))

    def to_frame(self) -> pd.DataFrame:
        coo = self.matrix.tocoo()
        return pd.DataFrame({"row": coo.row, "col": coo.col, "value": coo.data})


def _narrowest_feature(domain: DomainModel) -> float:
    segs = np.concatenate([segments_of(domain.polygon.boundary), segments_of(domain.slit_set)])
    return float(np.linalg.norm(segs[:, 1] - segs[:, 0], axis=1).min())


def assemble_dirichlet_form(
    domain: Union[DomainModel, Discretization],
    A: Union[str, CoefficientField] = "identity",
    h: Optional[float] = None,
) -> OperatorMatrix:
    """5-point discretisation of −div(A∇·) with Dirichlet data on D and natural data on Γ.

    Face coefficients are arithmetic means of the normal diagonal entry of A at
    the two cell centers. Interior cells closer than h/2 to D are eliminated.
    A face to an eliminated cell keeps its coefficient against the value 0, a
    D wall doubles it (the wall sits half a cell away), a Γ wall is dropped.

    Args:
        domain: Domain model, or an existing discretization of it
        A: Coefficient field or its name
        h: Cell side (ignored when a discretization is given)

    Returns:
        OperatorMatrix

    Raises:
        EllipticityViolated: A is not symmetric or not uniformly elliptic
        ResolutionTooCoarse: fewer than four cells across the shortest boundary edge
    """
    A = resolve_field(A)
    if isinstance(domain, Discretization):
        disc = domain
    else:
        if h is None:
            raise ValueError("a cell side h is required")
        disc = discretize(domain, h, margin=2 * h)
    h = disc.h
    model = disc.domain
    narrow = _narrowest_feature(model)
    if h > narrow / CELLS_ACROSS * (1 + 1e-12):
        raise ResolutionTooCoarse(f"h = {h:g} leaves fewer than {CELLS_ACROSS} cells across a boundary edge of length {narrow:.4g}")

    interior = np.flatnonzero(disc.interior)
    eliminated = disc.dist_d[interior] < h / 2 * _ELIMINATE_SLACK
    nodes = interior[~eliminated]
    coeffs = A(disc.centers)
    lam = check_ellipticity(A, coeffs[interior])

    position = np.full(disc.grid.size, -1, dtype=np.int64)
    position[nodes] = np.arange(len(nodes))
    faces = disc.faces
    fa, fb, axis, kind = faces.a, faces.b, faces.axis, faces.kind
    ca = coeffs[fa, axis, axis]
    cb = coeffs[fb, axis, axis]
    ia, ib = position[fa], position[fb]

    rows, cols, vals = [], [], []
    diag = np.zeros(len(nodes))

    open_face = kind == FaceKind.OPEN
    c_open = (ca + cb) / 2
    both = open_face & (ia >= 0) & (ib >= 0)
    rows += [ia[both], ib[both]]
    cols += [ib[both], ia[both]]
    vals += [-c_open[both], -c_open[both]]
    np.add.at(diag, ia[both], c_open[both])
    np.add.at(diag, ib[both], c_open[both])
    # one side eliminated: the eliminated value is 0
    for side, other in ((ia, ib), (ib, ia)):
        half = open_face & (side >= 0) & (other < 0)
        np.add.at(diag, side[half], c_open[half])

    # D walls, seen from each interior side
    d_wall = kind == FaceKind.D_WALL
    a_side = d_wall & (ia >= 0)
    np.add.at(diag, ia[a_side], 2 * ca[a_side])
    b_side = d_wall & (ib >= 0) & disc.interior[fb]
    np.add.at(diag, ib[b_side], 2 * cb[b_side])

    rows.append(np.arange(len(nodes)))
    cols.append(np.arange(len(nodes)))
    vals.append(diag)
    K = sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(len(nodes), len(nodes)),
    )
    K.sum_duplicates()
    K.sort_indices()

    tags = np.full(len(nodes), NodeTag.FREE, dtype=np.int8)
    g_wall = kind == FaceKind.GAMMA_WALL
    for side, cells in ((ia, fa), (ib, fb)):
        touch = g_wall & (side >= 0) & disc.interior[cells]
        tags[side[touch]] = NodeTag.GAMMA_NATURAL

    op = OperatorMatrix(
        disc=disc,
        matrix=(K / h**2).tocsr(),
        node_map=nodes,
        boundary_tags=tags,
        coefficient_field=A,
        ellipticity=lam,
    )
    logger.info(
        "Assembled L_D on %s with %s coefficients: h=%g, %d free nodes, %d eliminated",
        model.name,
        A.name,
        h,
        op.dimension,
        int(eliminated.sum()),
    )
    return op
