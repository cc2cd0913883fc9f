# mixedtraces/extension/__init__.py

from .grid_function import CellKind, Discretization, FaceKind, GridFunction, GridWindow, discretize, grid_window
from .partition import PartitionCheck, PartitionOfUnity, build_partition, check_partition
from .operator import SupportSeparation, cube_means, extend, support_separation, zero_extend_cube
from .cutoff import cutoff_vm, lipschitz_violations
from .omega_d import OmegaDSamples, zero_extend_omega_d

__all__ = [
    "CellKind",
    "Discretization",
    "FaceKind",
    "GridFunction",
    "GridWindow",
    "discretize",
    "grid_window",
    "PartitionCheck",
    "PartitionOfUnity",
    "build_partition",
    "check_partition",
    "SupportSeparation",
    "cube_means",
    "extend",
    "support_separation",
    "zero_extend_cube",
    "cutoff_vm",
    "lipschitz_violations",
    "OmegaDSamples",
    "zero_extend_omega_d",
]
