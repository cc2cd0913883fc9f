# mixedtraces/reflection/__init__.py

from .pairing import ReflectionMap, build_reflection, reflection_constants
from .diagnostics import ReflectionDiagnostics, verify_reflection

__all__ = [
    "ReflectionMap",
    "build_reflection",
    "reflection_constants",
    "ReflectionDiagnostics",
    "verify_reflection",
]
