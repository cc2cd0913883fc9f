# mixedtraces/geometry/__init__.py

from .domain import Box, DomainModel, DomainSpec, domain_from_spec, load_domain
from .distance import dist_to
from .regularity import RegularityReport, check_d_set
from .thickness import ThicknessReport, interior_thickness

__all__ = [
    "Box",
    "DomainModel",
    "DomainSpec",
    "domain_from_spec",
    "load_domain",
    "dist_to",
    "RegularityReport",
    "check_d_set",
    "ThicknessReport",
    "interior_thickness",
]
