# mixedtraces/interpolation/equivalence.py

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd
from tqdm import tqdm

from mixedtraces.dataflows.config import resolve
from mixedtraces.errors import DegenerateFamilyMember
from mixedtraces.extension.grid_function import GridFunction
from mixedtraces.norms.hardy import weighted_norm
from mixedtraces.norms.params import NormParams

from .k_functional import KProfile, KSolver, interpolation_norm, k_profile
from .space import QuadraticSolver, competitor_space

logger = logging.getLogger(__name__)


@dataclass
class EquivalenceReport:
    """Per-function ratios of two norms over a family, with their spread."""

    names: List[str]
    ratios: np.ndarray
    budget: float
    s: float
    p: float
    numerators: np.ndarray = field(default_factory=lambda: np.zeros(0))
    denominators: np.ndarray = field(default_factory=lambda: np.zeros(0))
    flags: List[str] = field(default_factory=list)

    @property
    def min(self) -> float:
        return float(self.ratios.min())

    @property
    def max(self) -> float:
        return float(self.ratios.max())

    @property
    def spread(self) -> float:
        return self.max / self.min if self.min > 0 else np.inf

    @property
    def passed(self) -> bool:
        return bool(np.all(np.isfinite(self.ratios))) and self.spread <= self.budget

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "name": self.names,
                "s": self.s,
                "p": self.p,
                "numerator": self.numerators,
                "denominator": self.denominators,
                "ratio": self.ratios,
            }
        )


def equivalence_report(
    family: Sequence[GridFunction],
    s: float,
    p: float,
    J: Optional[int] = None,
    budget: Optional[float] = None,
    profiles: Optional[List[KProfile]] = None,
) -> EquivalenceReport:
    """Ratio of the interpolation norm to the weighted fractional norm per family member.

    Args:
        family: Grid functions on one discretization
        s: Smoothness in (0, 1)
        p: Exponent in (1, ∞)
        J: Depth of the dyadic t-grid
        budget: Largest acceptable max/min spread
        profiles: K-profiles of the family; reused when already filled (they
            depend on p only), otherwise filled in

    Returns:
        EquivalenceReport

    Raises:
        DegenerateFamilyMember: a member has zero weighted norm
    """
    if not family:
        raise ValueError("the family is empty")
    budget = float(resolve("equivalence_budget", budget))
    params = NormParams(s=s, p=p)
    disc = family[0].disc
    reuse = profiles is not None and len(profiles) == len(family)
    if reuse and any(pr.p != p for pr in profiles):
        raise ValueError(f"profiles were computed for another p than {p}")
    if not reuse:
        space = competitor_space(disc)
        quadratic = QuadraticSolver(space)

    names, nums, dens = [], [], []
    for i, f in enumerate(tqdm(family, desc=f"equivalence s={s:g} p={p:g}", leave=False)):
        den = weighted_norm(f, params).value
        if not den > 0:
            raise DegenerateFamilyMember(f"{f.name} has zero weighted norm")
        if reuse:
            profile = profiles[i]
        else:
            profile = k_profile(f, p, J, solver=KSolver(f, p, space=space, quadratic=quadratic))
            if profiles is not None:
                profiles.append(profile)
        nums.append(interpolation_norm(f, s, p, profile=profile).value)
        dens.append(den)
        names.append(f.name)
    nums = np.array(nums)
    dens = np.array(dens)
    report = EquivalenceReport(
        names=names,
        ratios=nums / dens,
        budget=budget,
        s=s,
        p=p,
        numerators=nums,
        denominators=dens,
    )
    if params.critical():
        report.flags.append("critical-sp")
    logger.info(
        "Equivalence at s=%g, p=%g over %d functions: ratios in [%.4g, %.4g], spread %.4g (budget %g)",
        s,
        p,
        len(family),
        report.min,
        report.max,
        report.spread,
        budget,
    )
    return report
