# mixedtraces/dataflows/tables.py

import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, Union

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.12g"

PathType = Union[str, Path]


def save_table(data: pd.DataFrame, tag: str, out_dir: PathType) -> Path:
    """Write a table as `<tag>.csv` with a fixed float format.

    Args:
        data: Table to write
        tag: File stem
        out_dir: Bundle directory

    Returns:
        Path of the written file
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{tag}.csv"
    data.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info("%s saved to %s", tag, path)
    return path


def concat_tables(frames: Iterable[pd.DataFrame]) -> pd.DataFrame:
    frames = [f for f in frames if f is not None and len(f)]
    if not frames:
        return pd.DataFrame()
    return pd.concat(frames, ignore_index=True)


def sha256_file(path: PathType) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def manifest_hash(table_hashes: Dict[str, str]) -> str:
    """SHA-256 over the sorted `name:hash` lines of every table."""
    lines = "\n".join(f"{name}:{table_hashes[name]}" for name in sorted(table_hashes))
    return hashlib.sha256(lines.encode()).hexdigest()


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, float) and not np.isfinite(value):
        return str(value)
    return value


def write_json(payload: Dict[str, Any], path: PathType) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(_jsonable(payload), f, indent=4, sort_keys=True)
    return path
