# mixedtraces/experiments/__init__.py

from .bundle import SUMMARY_ITEMS, PipelineResult, ResultBundle, Status, write_bundle
from .families import FAMILY_KINDS, generate_family
from .pipelines import PIPELINES, PipelineParams
from .runner import ExperimentRunner, resolve_fixture

__all__ = [
    "SUMMARY_ITEMS",
    "PipelineResult",
    "ResultBundle",
    "Status",
    "write_bundle",
    "FAMILY_KINDS",
    "generate_family",
    "PIPELINES",
    "PipelineParams",
    "ExperimentRunner",
    "resolve_fixture",
]
