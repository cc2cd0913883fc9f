# mixedtraces/norms/params.py

import logging
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional

import pandas as pd

from mixedtraces.dataflows.config import resolve
from mixedtraces.errors import NonpositiveP

logger = logging.getLogger(__name__)

REGIONS = ("omega", "window", "omega_d")


@dataclass(frozen=True)
class NormParams:
    """Smoothness s ∈ (0, 1], integrability p ≥ 1, integration region and weight."""

    s: float
    p: float
    region: str = "omega"
    weighted: bool = False

    def __post_init__(self):
        if not self.p >= 1:
            raise NonpositiveP(f"p must be at least 1, got {self.p}")
        if not 0 < self.s <= 1:
            raise ValueError(f"s must lie in (0, 1], got {self.s}")
        if self.region not in REGIONS:
            raise ValueError(f"Unsupported region: {self.region}")

    @property
    def sp(self) -> float:
        return self.s * self.p

    def critical(self, band: Optional[float] = None) -> bool:
        """|sp − 1| below the critical band."""
        band = float(resolve("critical_sp_band", band))
        return abs(self.sp - 1.0) < band

    def on(self, region: str) -> "NormParams":
        return replace(self, region=region)


@dataclass
class NormReport:
    """A computed norm with its resolution, excluded diagonal mass and bias band."""

    op: str
    value: float
    h: float
    s: Optional[float] = None
    p: Optional[float] = None
    diagonal_band_excluded: float = 0.0
    band_exponent: Optional[float] = None
    estimated_bias: Optional[float] = None
    flags: List[str] = field(default_factory=list)
    parts: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.value < 0:
            raise ValueError(f"{self.op}: negative norm {self.value}")

    def to_frame(self, fixture: str = "") -> pd.DataFrame:
        return pd.DataFrame(
            [
                {
                    "fixture": fixture,
                    "op": self.op,
                    "s": self.s,
                    "p": self.p,
                    "h": self.h,
                    "value": self.value,
                    "bias": self.estimated_bias,
                    "flags": ";".join(self.flags),
                }
            ]
        )


def flag_critical(report: NormReport, params: NormParams) -> NormReport:
    if params.critical():
        report.flags.append("critical-sp")
        logger.warning("%s at s=%g, p=%g: sp = %.3g is within the critical band around 1", report.op, params.s, params.p, params.sp)
    return report


def with_bias(coarse: NormReport, fine: NormReport, tolerance: Optional[float] = None) -> NormReport:
    """Attach the relative change between resolutions h and h/2 to the fine report.

    Args:
        coarse: Report at h
        fine: Report of the same quantity at h/2
        tolerance: Relative change above which the `bias` flag is set

    Returns:
        A copy of `fine` with estimated_bias filled in
    """
    tolerance = float(resolve("stability_tolerance", tolerance))
    if coarse.op != fine.op:
        raise ValueError(f"cannot compare {coarse.op} with {fine.op}")
    scale = max(abs(fine.value), abs(coarse.value))
    bias = abs(fine.value - coarse.value) / scale if scale > 0 else 0.0
    report = replace(fine, estimated_bias=bias, flags=list(fine.flags), parts=dict(fine.parts))
    if bias > tolerance:
        report.flags.append("bias")
        logger.warning(
            "%s changes by %.1f%% from h=%g to h=%g (tolerance %.0f%%)",
            fine.op,
            100 * bias,
            coarse.h,
            fine.h,
            100 * tolerance,
        )
    return report
