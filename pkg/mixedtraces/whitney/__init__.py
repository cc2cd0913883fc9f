# mixedtraces/whitney/__init__.py

from .cubes import DyadicCube, long_distance
from .decomposition import WhitneyDecomposition, whitney_decompose
from .classes import CubeClasses, classify_cubes, decompose_domain
from .chains import ChainSweep, TouchingChain, chain_sweep, touching_chain
from .audit import (
    ReplayResult,
    WhitneyAudit,
    audit_decomposition,
    replay_boundary_layer,
    replay_exterior_point,
    replay_exterior_separation,
)

__all__ = [
    "DyadicCube",
    "long_distance",
    "WhitneyDecomposition",
    "whitney_decompose",
    "CubeClasses",
    "classify_cubes",
    "decompose_domain",
    "ChainSweep",
    "TouchingChain",
    "chain_sweep",
    "touching_chain",
    "ReplayResult",
    "WhitneyAudit",
    "audit_decomposition",
    "replay_boundary_layer",
    "replay_exterior_point",
    "replay_exterior_separation",
]
