# mixedtraces/norms/hardy.py

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
import pandas as pd

from mixedtraces.errors import ZeroDenominator
from mixedtraces.extension.grid_function import GridFunction
from mixedtraces.extension.operator import extend
from mixedtraces.extension.partition import PartitionOfUnity
from mixedtraces.reflection.pairing import ReflectionMap

from .gagliardo import gagliardo_seminorm
from .lp import lp_norm, region_cells, weighted_integral
from .params import NormParams, NormReport
from .sobolev import sobolev1_norm

logger = logging.getLogger(__name__)


def space_norm(f: GridFunction, params: NormParams) -> NormReport:
    """‖f‖_{W^{s,p}} on the region: ‖f‖_p + Gagliardo seminorm, or the W^{1,p} norm at s = 1."""
    if params.s >= 1:
        return sobolev1_norm(f, params.p, params.region)
    lp = lp_norm(f, params.p, region=params.region).value
    semi = gagliardo_seminorm(f, params)
    report = NormReport(
        op="fractional",
        value=lp + semi.value,
        h=f.h,
        s=params.s,
        p=params.p,
        diagonal_band_excluded=semi.diagonal_band_excluded,
        band_exponent=semi.band_exponent,
        flags=list(semi.flags),
        parts={"lp": lp, "seminorm": semi.value},
    )
    return report


def hardy_ratio(f: GridFunction, params: NormParams) -> float:
    """(∫_Ω |f|^p d_D^{−sp})^{1/p} / ‖f‖_{W^{s,p}(Ω)}.

    Args:
        f: Grid function on Ω
        params: s, p; the region is always Ω

    Returns:
        The ratio, 0 when D is empty

    Raises:
        ZeroDenominator: f vanishes on Ω
    """
    params = params.on("omega")
    if not np.any(f.flat[region_cells(f, "omega")]):
        raise ZeroDenominator(f"{f.name} vanishes on Ω")
    if not f.disc.domain.has_d:
        return 0.0
    if params.critical():
        logger.warning("hardy_ratio at sp = %.3g is within the critical band around 1", params.sp)
    numerator = weighted_integral(f, params.s, params.p) ** (1.0 / params.p)
    denominator = space_norm(f, params).value
    if denominator <= 0:
        raise ZeroDenominator(f"‖{f.name}‖ is zero")
    return float(numerator / denominator)


def weighted_norm(f: GridFunction, params: NormParams) -> NormReport:
    """‖f‖_{W^{s,p}(Ω)} + (∫_Ω |f|^p d_D^{−sp})^{1/p}, the norm of the weighted space.

    Args:
        f: Grid function on Ω
        params: s, p

    Returns:
        NormReport with parts `lp`, `seminorm` (or `grad` at s = 1) and `weighted`
    """
    params = params.on("omega")
    base = space_norm(f, params)
    weighted = weighted_integral(f, params.s, params.p) ** (1.0 / params.p)
    report = NormReport(
        op="weighted",
        value=base.value + weighted,
        h=f.h,
        s=params.s,
        p=params.p,
        diagonal_band_excluded=base.diagonal_band_excluded,
        band_exponent=base.band_exponent,
        flags=list(base.flags),
        parts={**base.parts, "weighted": weighted},
    )
    if not f.disc.domain.has_d:
        report.flags.append("empty-D")
    return report


@dataclass
class ExtensionRatio:
    numerator: float
    denominator: float
    sobolev1_ratio: float

    @property
    def ratio(self) -> float:
        if self.denominator <= 0:
            return np.inf
        return self.numerator / self.denominator

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [
                {
                    "ratio": self.ratio,
                    "numerator": self.numerator,
                    "denominator": self.denominator,
                    "sobolev1_ratio": self.sobolev1_ratio,
                }
            ]
        )


def extension_ratio(
    f: GridFunction,
    rmap: ReflectionMap,
    pu: PartitionOfUnity,
    params: NormParams,
    ext: Optional[GridFunction] = None,
) -> ExtensionRatio:
    """‖E_D f‖_{W^{s,p}(window)} / weighted_norm(f), plus the W^{1,p} ratio.

    Args:
        f: Grid function on Ω
        rmap: Reflection map
        pu: Partition of unity on the grid of f
        params: s, p
        ext: Precomputed E_D f

    Returns:
        ExtensionRatio

    Raises:
        ZeroDenominator: f vanishes on Ω
    """
    if ext is None:
        ext = extend(f, rmap, pu)
    denominator = weighted_norm(f, params).value
    if denominator <= 0:
        raise ZeroDenominator(f"{f.name} vanishes on Ω", operation="extension_ratio")
    numerator = space_norm(ext, params.on("window")).value
    s1_num = sobolev1_norm(ext, params.p, "window").value
    s1_den = sobolev1_norm(f, params.p, "omega").value
    result = ExtensionRatio(
        numerator=numerator,
        denominator=denominator,
        sobolev1_ratio=s1_num / s1_den if s1_den > 0 else np.inf,
    )
    logger.debug("Extension ratio of %s: %.4g (W^1p %.4g)", f.name, result.ratio, result.sobolev1_ratio)
    return result
