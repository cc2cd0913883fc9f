# mixedtraces/norms/omega_d.py

import logging
from typing import Optional

import numpy as np
from scipy import special

from mixedtraces.dataflows.config import resolve
from mixedtraces.errors import WingTruncationTooSmall
from mixedtraces.extension.omega_d import OmegaDSamples

from .gagliardo import N_DIM, pair_sum
from .params import NormParams, NormReport, flag_critical

logger = logging.getLogger(__name__)

TAIL_SHARE = 0.01
_CHUNK = 4096


def _height_integrals(r: np.ndarray, radius: float, a: float):
    """∫_{−R}^{R} (r² + t²)^{−a} dt and the two-sided tail beyond ±R."""
    u = radius / r
    scale = 2.0 * r ** (1.0 - 2.0 * a)
    inner = scale * u * special.hyp2f1(0.5, a, 1.5, -(u**2))
    full = 0.5 * special.beta(0.5, a - 0.5)
    tail = scale * full * special.betainc(a - 0.5, 0.5, 1.0 / (1.0 + u**2))
    return inner, tail


def omega_d_norm(
    F: OmegaDSamples,
    params: NormParams,
    kernel_sign: Optional[int] = None,
    block_size: Optional[int] = None,
    max_workers: Optional[int] = None,
) -> NormReport:
    """Trace-space norm of F on Ω_D = (Ω × {0}) ∪ (D × ℝ).

    ‖F‖_{L^p(Ω_D)} + (∫∫ |F(x) − F(y)|^p / |x − y|^κ)^{1/p} with κ = n ± sp.
    The slice × slice part is a pair sum over cells. The slice × wing part
    integrates the height exactly on [−R_w, R_w] and sums along D; the part
    beyond ±R_w is reported as `tail`. Wing × wing terms of a zero extension
    vanish.

    Args:
        F: Samples from zero_extend_omega_d
        params: s, p
        kernel_sign: +1 for n + sp, −1 for n − sp
        block_size: Tile side of the slice pair sum
        max_workers: Threads for the slice pair sum

    Returns:
        NormReport with parts `lp`, `slice`, `cross`, `tail` and `wing_wing`

    Raises:
        WingTruncationTooSmall: the tail beyond R_w exceeds 1% of the cross term
    """
    sign = int(resolve("kernel_exponent_sign", kernel_sign))
    if sign not in (1, -1):
        raise ValueError(f"Unsupported kernel exponent sign: {sign}")
    p = params.p
    kappa = N_DIM + sign * params.sp
    a = kappa / 2
    h = F.f.h
    weight = np.abs(F.slice_values) ** p

    slice_sum = 0.0
    if len(F.slice_values) > 1:
        slice_sum = (
            pair_sum(
                F.slice_values,
                F.slice_points,
                p,
                kappa,
                cutoff=h * (1 - 1e-9),
                block_size=block_size,
                max_workers=max_workers,
            )
            * F.slice_weight**2
        )

    cross = 0.0
    tail = 0.0
    live = np.flatnonzero(weight > 0)
    if len(live):
        if a <= 0.5:
            raise WingTruncationTooSmall(f"kernel exponent {kappa:g} ≤ 1 leaves the wing integral infinite")
        for start in range(0, len(live), _CHUNK):
            rows = live[start : start + _CHUNK]
            r = np.linalg.norm(F.slice_points[rows][:, None, :] - F.wing_points[None, :, :], axis=-1)
            inner, outer = _height_integrals(r, F.wing_radius, a)
            mass = weight[rows] * F.slice_weight * F.arc_step
            cross += float((mass[:, None] * inner).sum())
            tail += float((mass[:, None] * outer).sum())
        if tail > TAIL_SHARE * cross:
            raise WingTruncationTooSmall(
                f"tail beyond R_w = {F.wing_radius:g} is {100 * tail / cross:.2f}% of the cross term; raise wing_radius"
            )

    wing_wing = 0.0
    if F.wing_values.size and np.ptp(F.wing_values) > 0:
        arc = np.repeat(F.wing_points, len(F.wing_heights), axis=0)
        heights = np.tile(F.wing_heights, len(F.wing_points))
        wing_wing = (
            pair_sum(F.wing_values, np.column_stack([arc, heights]), p, kappa, cutoff=0.0, block_size=block_size)
            * F.wing_weight**2
        )

    lp = F.mass(p) ** (1.0 / p)
    double = slice_sum + 2.0 * cross + wing_wing
    semi = double ** (1.0 / p)
    report = NormReport(
        op="omega_d",
        value=float(lp + semi),
        h=h,
        s=params.s,
        p=p,
        diagonal_band_excluded=1.0 / max(len(F.slice_values), 1),
        band_exponent=(1 - params.s) * p,
        parts={"lp": lp, "slice": slice_sum, "cross": cross, "tail": tail, "wing_wing": wing_wing},
    )
    if sign < 0:
        report.flags.append("kernel-n-minus-sp")
    logger.debug("Ω_D norm of %s: %.6g (cross %.4g, tail %.2g)", F.f.name, report.value, cross, tail)
    return flag_critical(report, params)
