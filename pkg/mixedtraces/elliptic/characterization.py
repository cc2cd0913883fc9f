# mixedtraces/elliptic/characterization.py

import logging
from typing import Callable, Optional, Sequence

import numpy as np
from tqdm import tqdm

from mixedtraces.dataflows.config import resolve
from mixedtraces.errors import DegenerateFamilyMember
from mixedtraces.extension.grid_function import GridFunction
from mixedtraces.interpolation.equivalence import EquivalenceReport
from mixedtraces.norms.hardy import weighted_norm
from mixedtraces.norms.lp import lp_norm
from mixedtraces.norms.params import NormParams, NormReport

from .spectrum import Spectrum, fractional_power_apply

logger = logging.getLogger(__name__)

NormFn = Callable[[GridFunction, NormParams], NormReport]


def power_norm(spec: Spectrum, f: GridFunction, s: float) -> float:
    """‖L^{s/2} f‖₂ + ‖f‖₂ with the cell measure h²."""
    h = spec.operator.h
    x = spec.operator.restrict(f)
    powered = fractional_power_apply(spec, s / 2, x)
    return float(np.sqrt((powered**2).sum()) * h) + lp_norm(f, 2.0).value


def domain_characterization_report(
    spec: Spectrum,
    family: Sequence[GridFunction],
    s: float,
    norm: Optional[NormFn] = None,
    budget: Optional[float] = None,
) -> EquivalenceReport:
    """Per-function ratio of the graph norm of L^{s/2} to the weighted fractional norm.

    Args:
        spec: Spectrum of L_D built from an OperatorMatrix
        family: Grid functions on the operator's discretization, vanishing on the D collar
        s: Smoothness in (0, 1]
        norm: Denominator norm; defaults to weighted_norm
        budget: Largest acceptable max/min spread

    Returns:
        EquivalenceReport with p = 2

    Raises:
        DegenerateFamilyMember: a member has zero denominator
    """
    if not family:
        raise ValueError("the family is empty")
    norm = norm or weighted_norm
    budget = float(resolve("equivalence_budget", budget))
    params = NormParams(s=s, p=2.0)
    names, nums, dens = [], [], []
    for f in tqdm(family, desc=f"dom(L^{s / 2:g})", leave=False):
        den = norm(f, params).value
        if not den > 0:
            raise DegenerateFamilyMember(f"{f.name} has zero norm", operation="domain_characterization_report")
        nums.append(power_norm(spec, f, s))
        dens.append(den)
        names.append(f.name)
    nums = np.array(nums)
    dens = np.array(dens)
    report = EquivalenceReport(
        names=names,
        ratios=nums / dens,
        budget=budget,
        s=s,
        p=2.0,
        numerators=nums,
        denominators=dens,
    )
    logger.info(
        "dom(L^{%g}) against the weighted norm over %d functions: spread %.4g (budget %g)",
        s / 2,
        len(family),
        report.spread,
        budget,
    )
    return report
