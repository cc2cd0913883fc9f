# mixedtraces/elliptic/__init__.py

from .coefficients import CoefficientField, check_ellipticity, coefficient_field
from .operator import NodeTag, OperatorMatrix, assemble_dirichlet_form
from .spectrum import Spectrum, fractional_power_apply, heat_apply, spectral_decompose
from .heat import GaussianFit, KernelMatrix, fit_gaussian, heat_kernel
from .evolution import Trajectory, max_regularity_ratio, mild_solution
from .characterization import domain_characterization_report, power_norm

__all__ = [
    "CoefficientField",
    "check_ellipticity",
    "coefficient_field",
    "NodeTag",
    "OperatorMatrix",
    "assemble_dirichlet_form",
    "Spectrum",
    "fractional_power_apply",
    "heat_apply",
    "spectral_decompose",
    "GaussianFit",
    "KernelMatrix",
    "fit_gaussian",
    "heat_kernel",
    "Trajectory",
    "max_regularity_ratio",
    "mild_solution",
    "domain_characterization_report",
    "power_norm",
]
