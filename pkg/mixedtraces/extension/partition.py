# mixedtraces/extension/partition.py

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import shapely
from scipy import sparse

from mixedtraces.dataflows.config import resolve
from mixedtraces.errors import UncoveredExteriorCell
from mixedtraces.reflection.diagnostics import C_N
from mixedtraces.whitney.classes import CubeClasses

from .grid_function import CellKind, Discretization

logger = logging.getLogger(__name__)

PLATEAU = 2.0 - C_N


def ramp(u: np.ndarray) -> np.ndarray:
    """1 for u ≤ 2 − c_n, exp(1 − 1/(1 − t²)) on the ramp, 0 for u ≥ c_n."""
    u = np.asarray(u, dtype=float)
    t = np.clip((u - PLATEAU) / (C_N - PLATEAU), 0.0, 1.0)
    out = np.zeros_like(t)
    inner = t < 1.0
    out[inner] = np.exp(1.0 - 1.0 / (1.0 - t[inner] ** 2))
    return out


def ramp_derivative(u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    width = C_N - PLATEAU
    t = (u - PLATEAU) / width
    out = np.zeros_like(t)
    # exp(1 - 1/q) underflows long before q reaches 1e-3
    live = (t > 0.0) & (1.0 - t**2 > 1e-3)
    tl = t[live]
    q = 1.0 - tl**2
    out[live] = np.exp(1.0 - 1.0 / q) * (-2.0 * tl / q**2) / width
    return out


def bump_values(points: np.ndarray, centers: np.ndarray, sides: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """φ and ∇φ of the tensor bumps, one row per (point, cube) pair."""
    rel = (points - centers) / (sides[:, None] / 2)
    u = np.abs(rel)
    g = ramp(u)
    dg = ramp_derivative(u) * np.sign(rel) / (sides[:, None] / 2)
    phi = g[:, 0] * g[:, 1]
    grad = np.stack([dg[:, 0] * g[:, 1], g[:, 0] * dg[:, 1]], axis=1)
    return phi, grad


@dataclass(eq=False)
class PartitionOfUnity:
    """ψ_j = φ_j / Σ_k φ_k on exterior cells of a discretization.

    `matrix` has one row per exterior cell (`cells`) and one column per cube of
    classes.dec_omega.
    """

    classes: CubeClasses
    disc: Discretization
    cells: np.ndarray
    matrix: sparse.csr_matrix
    phi_sum: np.ndarray
    gradient_constant: float
    c_n: float = C_N

    @property
    def covered(self) -> np.ndarray:
        return self.phi_sum > 0

    def sums(self) -> np.ndarray:
        return np.asarray(self.matrix.sum(axis=1)).ravel()

    def support_violations(self) -> int:
        """Pairs (cell, cube) with ψ_j > 0 outside the closed box c_n·Q_j."""
        coo = self.matrix.tocoo()
        dec = self.classes.dec_omega
        pts = self.disc.centers[self.cells[coo.row]]
        half = self.c_n * dec.side[coo.col] / 2
        off = np.abs(pts - dec.centers[coo.col]).max(axis=1)
        return int(((coo.data > 0) & (off > half)).sum())

    def plateau_coverage(self) -> float:
        """Share of covered cells where some ψ_j equals 1."""
        if not self.covered.any():
            return 0.0
        top = np.zeros(len(self.cells))
        coo = self.matrix.tocoo()
        np.maximum.at(top, coo.row, coo.data)
        return float((top[self.covered] >= 1.0 - 1e-15).mean())


def _pairs(dec, pts: np.ndarray, c_n: float):
    half = c_n * dec.side / 2
    supports = shapely.box(
        dec.centers[:, 0] - half, dec.centers[:, 1] - half, dec.centers[:, 0] + half, dec.centers[:, 1] + half
    )
    tree = shapely.STRtree(supports)
    rows, cols = tree.query(shapely.points(pts), predicate="intersects")
    order = np.lexsort((cols, rows))
    return rows[order], cols[order]


def evaluate_partition(classes: CubeClasses, points: np.ndarray):
    """(rows, cols, ψ, ∇ψ, Σφ) for arbitrary points outside closure(Ω)."""
    dec = classes.dec_omega
    rows, cols = _pairs(dec, points, C_N)
    phi, grad = bump_values(points[rows], dec.centers[cols], dec.side[cols])
    total = np.bincount(rows, weights=phi, minlength=len(points))
    grad_total = np.stack(
        [np.bincount(rows, weights=grad[:, k], minlength=len(points)) for k in range(2)], axis=1
    )
    keep = phi > 0
    rows, cols, phi, grad = rows[keep], cols[keep], phi[keep], grad[keep]
    s = total[rows]
    psi = phi / s
    grad_psi = (grad * s[:, None] - phi[:, None] * grad_total[rows]) / (s**2)[:, None]
    return rows, cols, psi, grad_psi, total


def build_partition(classes: CubeClasses, disc: Discretization) -> PartitionOfUnity:
    """Normalised plateau bumps over every Whitney cube of the complement of closure(Ω).

    Args:
        classes: Cube classes; their dec_omega supplies the cubes
        disc: Grid on which ψ is evaluated (exterior cells only)

    Returns:
        PartitionOfUnity with the measured gradient constant C_pu

    Raises:
        UncoveredExteriorCell: an exterior cell inside a cube gets Σφ = 0
    """
    dec = classes.dec_omega
    cells = disc.cells(CellKind.EXTERIOR)
    pts = disc.centers[cells]
    rows, cols, psi, grad_psi, total = evaluate_partition(classes, pts)

    inside_cube = dec.locate(pts) >= 0
    bad = inside_cube & (total <= 0)
    if bad.any():
        x, y = pts[np.flatnonzero(bad)[0]]
        raise UncoveredExteriorCell(f"exterior cell at ({x:.6g}, {y:.6g}) has no bump; refine the decomposition")

    matrix = sparse.csr_matrix((psi, (rows, cols)), shape=(len(cells), len(dec)))
    matrix.sort_indices()
    c_pu = float((np.linalg.norm(grad_psi, axis=1) * dec.side[cols]).max(initial=0.0))
    pu = PartitionOfUnity(
        classes=classes,
        disc=disc,
        cells=cells,
        matrix=matrix,
        phi_sum=total,
        gradient_constant=c_pu,
    )
    logger.info(
        "Partition of unity on %s: %d exterior cells, %d covered, C_pu = %.4g",
        classes.domain.name,
        len(cells),
        int(pu.covered.sum()),
        c_pu,
    )
    return pu


@dataclass
class PartitionCheck:
    max_sum_error: float
    support_violations: int
    gradient_constant: float
    probes: int

    @property
    def passed(self) -> bool:
        return self.max_sum_error <= 1e-12 and self.support_violations == 0


def check_partition(pu: PartitionOfUnity, probe: Optional[int] = None) -> PartitionCheck:
    """Replay Σψ = 1 and the support property on the grid and on a probe lattice
    placed over c_n·Q_j for every exterior-cone cube."""
    probe = int(resolve("pu_probe", probe))
    classes = pu.classes
    dec = classes.dec_omega
    sums = pu.sums()[pu.covered]
    err = float(np.abs(sums - 1.0).max(initial=0.0))
    violations = pu.support_violations()
    c_pu = pu.gradient_constant

    we = classes.exterior_index
    probes = 0
    if len(we) and probe > 1:
        # probe lines run across the ramps, where the gradient peaks
        across = PLATEAU + (C_N - PLATEAU) * (np.arange(probe) + 0.5) / probe
        t = np.concatenate([-across[::-1], [0.0], across])
        offsets = np.array([(a, b) for b in t for a in t])
        half = (dec.side[we] / 2)[:, None, None]
        pts = (dec.centers[we][:, None, :] + offsets[None] * half).reshape(-1, 2)
        pts = pts[shapely.distance(shapely.points(pts), classes.domain.polygon) > 0]
        rows, cols, psi, grad_psi, total = evaluate_partition(classes, pts)
        probes = len(pts)
        s = np.bincount(rows, weights=psi, minlength=len(pts))
        covered = total > 0
        err = max(err, float(np.abs(s[covered] - 1.0).max(initial=0.0)))
        off = np.abs(pts[rows] - dec.centers[cols]).max(axis=1)
        violations += int((off > C_N * dec.side[cols] / 2).sum())
        c_pu = max(c_pu, float((np.linalg.norm(grad_psi, axis=1) * dec.side[cols]).max(initial=0.0)))
    return PartitionCheck(max_sum_error=err, support_violations=violations, gradient_constant=c_pu, probes=probes)
