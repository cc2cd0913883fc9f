# mixedtraces/experiments/bundle.py

import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional

import pandas as pd

from mixedtraces import __version__
from mixedtraces.dataflows.tables import manifest_hash, save_table, sha256_file, write_json

logger = logging.getLogger(__name__)


class Status(str, Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    INCONCLUSIVE = "INCONCLUSIVE"


# summary item id -> acceptance criterion
SUMMARY_ITEMS = {
    "whitney_axioms": "1",
    "distance_replays": "2",
    "partition_of_unity": "3",
    "extension_operator": "4",
    "extension_boundedness": "5",
    "hardy_dichotomy": "6",
    "cutoff_density": "7",
    "interpolation_identity": "8",
    "elliptic_suite": "9",
    "determinism": "10",
    "cigar": "cigar",
}


def status_of(passed: bool, conclusive: bool = True) -> Status:
    if not passed:
        return Status.FAIL
    return Status.PASS if conclusive else Status.INCONCLUSIVE


def combine(*statuses: Status) -> Status:
    """FAIL dominates INCONCLUSIVE, which dominates PASS."""
    if Status.FAIL in statuses:
        return Status.FAIL
    if Status.INCONCLUSIVE in statuses:
        return Status.INCONCLUSIVE
    return Status.PASS


@dataclass
class PipelineResult:
    """What an experiment pipeline hands to the bundle writer."""

    tables: Dict[str, pd.DataFrame] = field(default_factory=dict)
    summary: Dict[str, Status] = field(default_factory=dict)
    timings: Dict[str, float] = field(default_factory=dict)

    def add_table(self, tag: str, frame: pd.DataFrame):
        if tag in self.tables:
            frame = pd.concat([self.tables[tag], frame], ignore_index=True)
        self.tables[tag] = frame

    def set_status(self, item: str, status: Status):
        if item not in SUMMARY_ITEMS:
            raise ValueError(f"Unsupported summary item: {item}")
        self.summary[item] = status


@dataclass
class ResultBundle:
    out_dir: Path
    manifest: Dict[str, Any]
    tables: Dict[str, Path]
    summary: Dict[str, str]

    @property
    def table_hashes(self) -> Dict[str, str]:
        return self.manifest["tables"]

    @property
    def failed(self) -> bool:
        return any(v == Status.FAIL.value for v in self.summary.values())

    @property
    def exit_code(self) -> int:
        return 1 if self.failed else 0


def write_tables(result: PipelineResult, out_dir: Path) -> Dict[str, Path]:
    """CSV tables in sorted tag order."""
    return {tag: save_table(result.tables[tag], tag, out_dir) for tag in sorted(result.tables)}


def write_bundle(
    result: PipelineResult,
    out_dir: Path,
    config: Dict[str, Any],
    wall_clock: Dict[str, Any],
    extra_summary: Optional[Dict[str, Status]] = None,
) -> ResultBundle:
    """Write tables, summary.json and manifest.json into `out_dir`.

    Args:
        result: Tables and summary items of a pipeline run
        out_dir: Bundle directory
        config: Experiment configuration echoed into the manifest
        wall_clock: Start time and elapsed seconds
        extra_summary: Items decided after the run (determinism)

    Returns:
        ResultBundle
    """
    out_dir = Path(out_dir)
    paths = write_tables(result, out_dir)
    hashes = {f"{tag}.csv": sha256_file(path) for tag, path in paths.items()}

    summary = {item: status.value for item, status in result.summary.items()}
    for item, status in (extra_summary or {}).items():
        summary[item] = status.value
    write_json(
        {"items": summary, "criteria": {item: SUMMARY_ITEMS[item] for item in summary}},
        out_dir / "summary.json",
    )

    manifest = {
        "version": __version__,
        "config": config,
        "wall_clock": wall_clock,
        "timings": result.timings,
        "tables": hashes,
        "manifest_hash": manifest_hash(hashes),
    }
    write_json(manifest, out_dir / "manifest.json")
    logger.info("Bundle written to %s (%d tables, manifest %s)", out_dir, len(paths), manifest["manifest_hash"][:12])
    return ResultBundle(out_dir=out_dir, manifest=manifest, tables=paths, summary=summary)
