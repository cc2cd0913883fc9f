# mixedtraces/interpolation/__init__.py

from .space import CompetitorSpace, QuadraticSolver, competitor_space
from .solvers import SearchResult, fista, lambda_search
from .k_functional import (
    Candidate,
    KProfile,
    KSolver,
    Subadditivity,
    interpolation_norm,
    k_functional,
    k_profile,
    subadditivity,
)
from .equivalence import EquivalenceReport, equivalence_report

__all__ = [
    "CompetitorSpace",
    "QuadraticSolver",
    "competitor_space",
    "SearchResult",
    "fista",
    "lambda_search",
    "Candidate",
    "KProfile",
    "KSolver",
    "interpolation_norm",
    "k_functional",
    "k_profile",
    "Subadditivity",
    "subadditivity",
    "EquivalenceReport",
    "equivalence_report",
]
