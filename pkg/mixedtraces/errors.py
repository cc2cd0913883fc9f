# mixedtraces/errors.py

from typing import Optional


class MixedTracesError(ValueError):
    """Base class for every error raised by the toolkit.

    Each error names the module and operation it came from so that the CLI can
    print a one-line diagnostic.
    """

    module: str = "mixedtraces"
    operation: Optional[str] = None

    def __init__(self, message: str, *, operation: Optional[str] = None):
        super().__init__(message)
        if operation is not None:
            self.operation = operation

    def diagnostic(self) -> str:
        where = self.module if not self.operation else f"{self.module}.{self.operation}"
        return f"{where}: {self}"


class ConfigError(MixedTracesError):
    module = "cli"
    operation = "run_experiment"


# geometry
class MalformedSpec(MixedTracesError):
    module = "geometry"
    operation = "load_domain"


class InvalidGeometry(MixedTracesError):
    module = "geometry"
    operation = "load_domain"


class DisconnectedDomain(MixedTracesError):
    module = "geometry"
    operation = "load_domain"


class EmptySet(MixedTracesError):
    module = "geometry"
    operation = "check_d_set"


class UnreachablePoints(MixedTracesError):
    module = "geometry"
    operation = "quasihyperbolic_distance"


class PairOutsideDomain(MixedTracesError):
    module = "geometry"
    operation = "check_cigar"


class EmptyGamma(MixedTracesError):
    module = "geometry"
    operation = "interior_thickness"


# whitney
class EmptyClosedSet(MixedTracesError):
    module = "whitney"
    operation = "whitney_decompose"


class WindowTooSmall(MixedTracesError):
    module = "whitney"
    operation = "whitney_decompose"


class InvalidParameters(MixedTracesError):
    module = "whitney"
    operation = "classify_cubes"


class ChainNotFound(MixedTracesError):
    module = "whitney"
    operation = "touching_chain"


# reflection
class EmptyInteriorClass(MixedTracesError):
    module = "reflection"
    operation = "build_reflection"


# extension
class UncoveredExteriorCell(MixedTracesError):
    module = "extension"
    operation = "build_partition"


class InconsistentInputs(MixedTracesError):
    module = "extension"
    operation = "extend"


class EmptyD(MixedTracesError):
    module = "extension"
    operation = "cutoff_vm"


# norms
class NonpositiveP(MixedTracesError):
    module = "norms"
    operation = "lp_norm"


class RegionTooSmall(MixedTracesError):
    module = "norms"
    operation = "gagliardo_seminorm"


class ZeroDenominator(MixedTracesError):
    module = "norms"
    operation = "hardy_ratio"


class WingTruncationTooSmall(MixedTracesError):
    module = "norms"
    operation = "omega_d_norm"


# interpolation
class SolverDiverged(MixedTracesError):
    module = "interpolation"
    operation = "k_functional"


class DegenerateFamilyMember(MixedTracesError):
    module = "interpolation"
    operation = "equivalence_report"


# elliptic
class EllipticityViolated(MixedTracesError):
    module = "elliptic"
    operation = "assemble_dirichlet_form"


class ResolutionTooCoarse(MixedTracesError):
    module = "elliptic"
    operation = "assemble_dirichlet_form"


class DimensionBudgetExceeded(MixedTracesError):
    module = "elliptic"
    operation = "spectral_decompose"


class ZeroForcing(MixedTracesError):
    module = "elliptic"
    operation = "max_regularity_ratio"
