"""QFLD v1 field snapshots: self-describing, diffable text files.

Layout: '#'-prefixed header lines carrying dim, n, time, model
coefficients and the component order, then one CSV row per lattice point
in row-major order with x fastest.  Columns are the point coordinates
followed by the independent components.  Values are written with 17
significant digits so a parsed snapshot is bit-identical to the field it
came from.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .grid_field import PeriodicGrid, TensorField
from .qtensor import COMP_NAMES

FORMAT_TAG = "QFLD v1"
_FLOAT_FMT = "%.16E"


@dataclass(frozen=True)
class Snapshot:
    field: TensorField
    t: float
    model: dict[str, float]


def write_snapshot(
    path: str | Path, field: TensorField, t: float, model: dict[str, float]
) -> None:
    grid = field.grid
    names = COMP_NAMES[grid.dim]
    coord_names = ("x", "y", "z")[: grid.dim]
    coords = grid.coordinate_arrays()
    columns = [c.ravel() for c in coords]
    columns += [plane.ravel() for plane in field.data]
    table = np.column_stack(columns)
    header = [
        f"# {FORMAT_TAG}",
        f"# dim = {grid.dim}",
        f"# n = {grid.n}",
        f"# t = {_FLOAT_FMT % t}",
        "# model = " + ",".join(f"{k}={_FLOAT_FMT % v}" for k, v in model.items()),
        "# components = " + " ".join(names),
        "# columns = " + ",".join(coord_names + names),
    ]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(header) + "\n")
        np.savetxt(fh, table, fmt=_FLOAT_FMT, delimiter=",")


def read_snapshot(path: str | Path) -> Snapshot:
    meta: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline().strip()
        if first != f"# {FORMAT_TAG}":
            raise ValueError(f"{path}: not a {FORMAT_TAG} file (got {first!r})")
        pos = fh.tell()
        line = fh.readline()
        while line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                key, _, value = body.partition("=")
                meta[key.strip()] = value.strip()
            pos = fh.tell()
            line = fh.readline()
        fh.seek(pos)
        table = np.loadtxt(fh, delimiter=",", ndmin=2)
    try:
        dim = int(meta["dim"])
        n = int(meta["n"])
        t = float(meta["t"])
    except KeyError as exc:
        raise ValueError(f"{path}: missing header field {exc}") from exc
    grid = PeriodicGrid(dim=dim, n=n)
    ncols = dim + len(COMP_NAMES[dim])
    if table.shape != (n**dim, ncols):
        raise ValueError(
            f"{path}: expected {n**dim} rows x {ncols} columns, got {table.shape}"
        )
    planes = [table[:, dim + i].reshape(grid.shape) for i in range(len(COMP_NAMES[dim]))]
    model: dict[str, float] = {}
    for item in meta.get("model", "").split(","):
        if "=" in item:
            key, _, value = item.partition("=")
            model[key.strip()] = float(value)
    return Snapshot(field=TensorField(grid, np.stack(planes)), t=t, model=model)
