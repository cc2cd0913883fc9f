# mixedtraces/norms/gagliardo.py

import logging
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np
from scipy.signal import fftconvolve

from mixedtraces.dataflows.config import resolve
from mixedtraces.errors import RegionTooSmall
from mixedtraces.extension.grid_function import GridFunction

from .lp import region_cells
from .params import NormParams, NormReport, flag_critical

logger = logging.getLogger(__name__)

N_DIM = 2
# per-offset difference sums kept for reuse across s
SUMS_CACHE_SIZE = 64
MAX_BOX_CELLS = 128 * 128


def _tiles(n: int, block: int) -> List[Tuple[int, int, int, int]]:
    starts = list(range(0, n, block))
    return [(a, min(a + block, n), b, min(b + block, n)) for i, a in enumerate(starts) for b in starts[i:]]


def pair_sum(
    values: np.ndarray,
    centers: np.ndarray,
    p: float,
    kernel: float,
    cutoff: float,
    block_size: Optional[int] = None,
    max_workers: Optional[int] = None,
) -> float:
    """Σ over ordered pairs with |x − y| ≥ cutoff of |v_x − v_y|^p / |x − y|^kernel.

    Upper-triangular tiles are summed independently and reduced in tile order,
    so the result does not depend on the thread count.
    """
    block = int(resolve("block_size", block_size))
    workers = int(resolve("max_workers", max_workers))
    n = len(values)

    def tile(bounds):
        a0, a1, b0, b1 = bounds
        diff = np.abs(values[a0:a1, None] - values[None, b0:b1]) ** p
        d2 = ((centers[a0:a1, None, :] - centers[None, b0:b1, :]) ** 2).sum(-1)
        keep = d2 >= cutoff * cutoff
        if a0 == b0:
            keep &= np.triu(np.ones(keep.shape, dtype=bool), k=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(keep, diff / d2 ** (kernel / 2), 0.0)
        return float(terms.sum())

    tiles = _tiles(n, block)
    if workers > 1 and len(tiles) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(tile, tiles))
    else:
        partials = [tile(t) for t in tiles]
    return 2.0 * float(np.sum(np.asarray(partials)))


@lru_cache(maxsize=16)
def lattice_lengths(ny: int, nx: int, h: float) -> np.ndarray:
    """|δ|·h for every lattice offset δ = (dy, dx) ≥ 0 of an ny × nx grid, computed once per grid."""
    dy, dx = np.meshgrid(np.arange(ny), np.arange(nx), indexing="ij")
    lengths = h * np.hypot(dy, dx)
    lengths.setflags(write=False)
    return lengths


def lattice_offsets(ny: int, nx: int) -> Tuple[np.ndarray, np.ndarray]:
    """One offset per unordered cell pair: dy > 0, or dy = 0 and dx > 0."""
    dy, dx = np.meshgrid(np.arange(ny), np.arange(-(nx - 1), nx), indexing="ij")
    keep = (dy > 0) | (dx > 0)
    return dy[keep], dx[keep]


def support_box(f: GridFunction, mask: np.ndarray) -> Optional[Tuple[slice, slice]]:
    """Row and column slices of the bounding box of the nonzero cells of f inside `mask`."""
    live = mask & (f.values != 0)
    if not live.any():
        return None
    rows = np.flatnonzero(live.any(axis=1))
    cols = np.flatnonzero(live.any(axis=0))
    return slice(int(rows[0]), int(rows[-1]) + 1), slice(int(cols[0]), int(cols[-1]) + 1)


@lru_cache(maxsize=SUMS_CACHE_SIZE)
def _offset_sums(values: bytes, mask: bytes, shape: Tuple[int, int], p: float, block: int, workers: int) -> np.ndarray:
    v = np.frombuffer(values, dtype=float).reshape(shape)
    m = np.frombuffer(mask, dtype=bool).reshape(shape)
    ny, nx = shape
    dys, dxs = lattice_offsets(ny, nx)

    def chunk(bounds):
        a, b = bounds
        out = np.zeros(b - a)
        for k in range(a, b):
            dy, dx = int(dys[k]), int(dxs[k])
            lo, hi = max(0, -dx), nx - max(0, dx)
            both = m[: ny - dy, lo:hi] & m[dy:, lo + dx : hi + dx]
            diff = np.abs(v[: ny - dy, lo:hi] - v[dy:, lo + dx : hi + dx]) ** p
            out[k - a] = diff.sum(where=both)
        return out

    chunks = [(a, min(a + block, len(dys))) for a in range(0, len(dys), block)]
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(chunk, chunks))
    else:
        parts = [chunk(c) for c in chunks]
    sums = np.concatenate(parts) if parts else np.zeros(0)
    sums.setflags(write=False)
    return sums


def offset_sums(
    values: np.ndarray,
    mask: np.ndarray,
    p: float,
    block_size: Optional[int] = None,
    max_workers: Optional[int] = None,
) -> np.ndarray:
    """Σ |v_x − v_{x+δ}|^p over cells x, x + δ both in `mask`, one entry per lattice_offsets δ.

    Offsets are split into chunks summed independently and concatenated in
    offset order, so the result does not depend on the thread count. Results
    are cached by content, so a function evaluated at several s is swept once per p.
    """
    block = int(resolve("block_size", block_size))
    workers = int(resolve("max_workers", max_workers))
    values = np.ascontiguousarray(values, dtype=float)
    mask = np.ascontiguousarray(mask, dtype=bool)
    return _offset_sums(values.tobytes(), mask.tobytes(), values.shape, float(p), block, workers)


def _tail(f: GridFunction, mask: np.ndarray, box: Tuple[slice, slice], p: float, kernel: float) -> float:
    """Σ over x in the box, y in the region outside it of |v_x|^p / |x − y|^kernel."""
    outside = mask.copy()
    outside[box] = False
    if not outside.any():
        return 0.0
    ny, nx = mask.shape
    lengths = lattice_lengths(ny, nx, f.h)
    full = lengths[np.abs(np.arange(-(ny - 1), ny))][:, np.abs(np.arange(-(nx - 1), nx))]
    with np.errstate(divide="ignore"):
        weights = np.where(full > 0, full ** (-kernel), 0.0)
    near = np.maximum(fftconvolve(outside.astype(float), weights, mode="same"), 0.0)
    inner = mask[box]
    return float((np.abs(f.values[box][inner]) ** p * near[box][inner]).sum())


def gagliardo_seminorm(
    f: GridFunction,
    params: NormParams,
    kernel_exponent: Optional[float] = None,
    block_size: Optional[int] = None,
    max_workers: Optional[int] = None,
) -> NormReport:
    """Discrete Gagliardo seminorm over Ω or the whole window.

    (Σ_{x≠y} |f(x) − f(y)|^p / |x − y|^{n+sp} · h⁴)^{1/p} over cell pairs at
    distance ≥ h. Pairs inside the bounding box of supp f are summed per
    lattice offset; pairs reaching out of the box, where f = 0, reduce to
    |f(x)|^p times a kernel mass obtained by FFT convolution. The excluded
    diagonal band is reported as a share of the pairs together with its decay
    exponent (1 − s)p.

    Args:
        f: Grid function
        params: s ∈ (0, 1), p and region
        kernel_exponent: Overrides n + sp
        block_size: Offsets per worker task
        max_workers: Threads for the offset sums

    Returns:
        NormReport
    """
    if params.s >= 1:
        raise ValueError("the Gagliardo seminorm needs s < 1; use sobolev1_norm for s = 1")
    cells = region_cells(f, params.region)
    if len(cells) < 2:
        raise RegionTooSmall(f"{params.region} has {len(cells)} cells")
    kernel = N_DIM + params.sp if kernel_exponent is None else float(kernel_exponent)
    h = f.h
    mask = np.zeros(f.grid.size, dtype=bool)
    mask[cells] = True
    mask = mask.reshape(f.grid.shape)

    box = support_box(f, mask)
    total = 0.0
    if box is not None:
        values = np.where(mask[box], f.values[box], 0.0)
        if values.size > MAX_BOX_CELLS:
            logger.warning("%s: support box of %d cells exceeds the %d-cell grid cap", f.name, values.size, MAX_BOX_CELLS)
        sums = offset_sums(values, mask[box], params.p, block_size, max_workers)
        dys, dxs = lattice_offsets(*values.shape)
        lengths = lattice_lengths(*f.grid.shape, h)[dys, np.abs(dxs)]
        total = 2.0 * (float(np.dot(sums, lengths ** (-kernel))) + _tail(f, mask, box, params.p, kernel))
        logger.debug("%s: support box %d × %d of %d region cells", f.name, values.shape[0], values.shape[1], len(cells))
    value = (total * h**4) ** (1.0 / params.p)
    report = NormReport(
        op="gagliardo",
        value=float(value),
        h=h,
        s=params.s,
        p=params.p,
        diagonal_band_excluded=1.0 / len(cells),
        band_exponent=(1 - params.s) * params.p,
    )
    logger.debug("Gagliardo seminorm of %s on %s: %.6g", f.name, params.region, value)
    return flag_critical(report, params)
