# mixedtraces/dataflows/gridfn.py

import io
import logging
from pathlib import Path
from typing import Union

import numpy as np

from mixedtraces.errors import MalformedSpec
from mixedtraces.extension.grid_function import Discretization, GridFunction

logger = logging.getLogger(__name__)

HEADER = "# mixedtraces gridfn v1"
MASK_MARKER = "mask"
_GRID_TOL = 1e-12


def dumps_gridfn(f: GridFunction) -> str:
    """Text form of a grid function: header, values, then cell kinds (see docs/gridfn.md)."""
    g = f.grid
    out = io.StringIO()
    out.write(f"{HEADER}\n")
    out.write(f"name {f.name}\n")
    out.write(f"domain {f.disc.domain.name}\n")
    out.write(f"grid {g.xmin!r} {g.ymin!r} {g.h!r} {g.nx} {g.ny}\n")
    np.savetxt(out, f.values, fmt="%.17g")
    out.write(f"{MASK_MARKER}\n")
    np.savetxt(out, f.mask, fmt="%d")
    return out.getvalue()


def write_gridfn(f: GridFunction, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_gridfn(f))
    logger.debug("Grid function %s written to %s", f.name, path)
    return path


def _block(lines, nx: int, ny: int, what: str, dtype=float) -> np.ndarray:
    try:
        values = np.loadtxt(io.StringIO("\n".join(lines)), ndmin=2, dtype=dtype)
    except ValueError as exc:
        raise MalformedSpec(f"bad {what} block: {exc}", operation="read_gridfn") from exc
    if values.shape != (ny, nx):
        raise MalformedSpec(f"expected {ny}×{nx} {what}, found {values.shape}", operation="read_gridfn")
    return values


def read_gridfn(source: Union[str, Path], disc: Discretization) -> GridFunction:
    """Parse a grid function written by `write_gridfn` onto a matching discretization.

    Args:
        source: Path or the text itself
        disc: Discretization whose grid and cell kinds the file must match

    Returns:
        GridFunction

    Raises:
        MalformedSpec: bad header, or a grid or mask that does not match `disc`
    """
    text = Path(source).read_text() if isinstance(source, Path) else source
    lines = text.splitlines()
    if len(lines) < 4 or lines[0].strip() != HEADER:
        raise MalformedSpec("not a gridfn document", operation="read_gridfn")
    fields = {}
    for line in lines[1:4]:
        key, _, value = line.partition(" ")
        fields[key] = value.strip()
    try:
        xmin, ymin, h = (float(v) for v in fields["grid"].split()[:3])
        nx, ny = (int(v) for v in fields["grid"].split()[3:5])
    except (KeyError, ValueError) as exc:
        raise MalformedSpec(f"bad grid line: {exc}", operation="read_gridfn") from exc
    g = disc.grid
    if (nx, ny) != (g.nx, g.ny) or max(abs(xmin - g.xmin), abs(ymin - g.ymin), abs(h - g.h)) > _GRID_TOL:
        raise MalformedSpec(
            f"grid ({xmin}, {ymin}, {h}, {nx}, {ny}) does not match the discretization",
            operation="read_gridfn",
        )

    body = lines[4:]
    marker = [i for i, line in enumerate(body) if line.strip() == MASK_MARKER]
    if not marker:
        raise MalformedSpec("missing mask block", operation="read_gridfn")
    values = _block(body[: marker[0]], nx, ny, "values")
    mask = _block(body[marker[0] + 1 :], nx, ny, "mask codes", dtype=np.int64)
    if not np.array_equal(mask, disc.mask):
        raise MalformedSpec("cell kinds do not match the discretization", operation="read_gridfn")
    return GridFunction(disc, values, name=fields.get("name", "f"))
