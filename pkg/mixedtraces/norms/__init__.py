# mixedtraces/norms/__init__.py

from .params import NormParams, NormReport, flag_critical, with_bias
from .lp import distance_weight, lp_norm, region_cells, weighted_integral
from .gagliardo import gagliardo_seminorm, offset_sums, pair_sum, support_box
from .sobolev import discrete_gradient, sobolev1_norm
from .hardy import ExtensionRatio, extension_ratio, hardy_ratio, space_norm, weighted_norm
from .omega_d import omega_d_norm

__all__ = [
    "NormParams",
    "NormReport",
    "flag_critical",
    "with_bias",
    "distance_weight",
    "lp_norm",
    "region_cells",
    "weighted_integral",
    "gagliardo_seminorm",
    "offset_sums",
    "pair_sum",
    "support_box",
    "discrete_gradient",
    "sobolev1_norm",
    "ExtensionRatio",
    "extension_ratio",
    "hardy_ratio",
    "space_norm",
    "weighted_norm",
    "omega_d_norm",
]
