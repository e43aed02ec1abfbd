"""Periodic lattice, tensor fields, initial states, and field reductions.

A field stores one component plane per independent tensor component,
shape (ncomp, n, n) in 2D and (ncomp, n, n, n) in 3D.  Spatial axes are
ordered (y, x) resp. (z, y, x) so that C-order flattening enumerates
points row-major with x fastest.  Reductions use fixed-shape numpy
summations and are therefore reproducible run to run.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .nonlinearity import (
    ModelParams,
    bulk_force_and_jac_comps,
    bulk_force_comps,
    frob2_comps,
)
from .qtensor import N_COMPS, QTensor, eigvals_comps


class GridMismatchError(ValueError):
    """Fields from different grids were combined."""


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform periodic lattice over (0, 2*pi)^dim with n points per axis."""

    dim: int
    n: int

    def __post_init__(self) -> None:
        if self.dim not in (2, 3):
            raise ValueError(f"dim must be 2 or 3, got {self.dim}")
        if self.n < 4:
            raise ValueError(f"n must be at least 4, got {self.n}")

    @property
    def h(self) -> float:
        return 2.0 * np.pi / self.n

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.dim

    @property
    def ncomp(self) -> int:
        return N_COMPS[self.dim]

    def axis_coords(self) -> np.ndarray:
        return np.arange(self.n) * self.h

    def coordinate_arrays(self) -> tuple[np.ndarray, ...]:
        """Coordinate grids (x, y[, z]), each of shape ``self.shape``."""
        axes = np.meshgrid(*([self.axis_coords()] * self.dim), indexing="ij")
        return tuple(reversed(axes))


@dataclass
class TensorField:
    """One symmetric traceless tensor per lattice point, stored as planes."""

    grid: PeriodicGrid
    data: np.ndarray

    def __post_init__(self) -> None:
        expected = (self.grid.ncomp,) + self.grid.shape
        data = np.ascontiguousarray(self.data, dtype=float)
        if data.shape != expected:
            raise ValueError(f"expected data shape {expected}, got {data.shape}")
        self.data = data

    def copy(self) -> "TensorField":
        return TensorField(self.grid, self.data.copy())

    def point(self, *index: int) -> QTensor:
        """Tensor at lattice index (iy, ix) or (iz, iy, ix)."""
        return QTensor(self.grid.dim, self.data[(slice(None),) + index])


@dataclass(frozen=True)
class FieldStats:
    """Norms and eigenvalue extrema of a field."""

    sup_frob: float
    sup_spectral: float
    l2_norm: float
    min_eig: float
    max_eig: float


def zeros(grid: PeriodicGrid) -> TensorField:
    return TensorField(grid, np.zeros((grid.ncomp,) + grid.shape))


def constant_field(grid: PeriodicGrid, q: QTensor) -> TensorField:
    if q.dim != grid.dim:
        raise ValueError(f"tensor dim {q.dim} != grid dim {grid.dim}")
    data = np.broadcast_to(
        q.comps.reshape((grid.ncomp,) + (1,) * grid.dim), (grid.ncomp,) + grid.shape
    )
    return TensorField(grid, data.copy())


def ic_director(grid: PeriodicGrid, name: str) -> TensorField:
    """Director-derived initial state on the lattice.

    ``paper2d``: Q0 = n0 n0^T - I/2 with n0 = (cos(x+y), sin(x+y)).
    ``paper3d``: Q0 = n0 n0^T - I/3 with
    n0 = (cos(x+y+z), sin(x+y+z), 1) * sqrt(2)/2.
    """
    if name == "paper2d":
        if grid.dim != 2:
            raise ValueError("paper2d initial condition requires a 2D grid")
        x, y = grid.coordinate_arrays()
        s = x + y
        cs, sn = np.cos(s), np.sin(s)
        return TensorField(grid, np.stack([cs * cs - 0.5, cs * sn]))
    if name == "paper3d":
        if grid.dim != 3:
            raise ValueError("paper3d initial condition requires a 3D grid")
        x, y, z = grid.coordinate_arrays()
        s = x + y + z
        half = np.sqrt(2.0) / 2.0
        nx, ny = half * np.cos(s), half * np.sin(s)
        nz = np.full(grid.shape, half)
        third = 1.0 / 3.0
        return TensorField(
            grid,
            np.stack(
                [nx * nx - third, nx * ny, nx * nz, ny * ny - third, ny * nz]
            ),
        )
    raise ValueError(f"unknown initial condition {name!r}")


def lincomb(coeffs, fields) -> TensorField:
    """Pointwise linear combination sum_i coeffs[i] * fields[i]."""
    coeffs = list(coeffs)
    fields = list(fields)
    if len(coeffs) != len(fields) or not fields:
        raise ValueError("coeffs and fields must be nonempty and equally long")
    grid = fields[0].grid
    for f in fields[1:]:
        if f.grid != grid:
            raise GridMismatchError("fields live on different grids")
    out = coeffs[0] * fields[0].data
    for c, f in zip(coeffs[1:], fields[1:]):
        out += c * f.data
    return TensorField(grid, out)


def map_bulk(field: TensorField, p: ModelParams, which: str) -> TensorField:
    """Apply the bulk force or its self-directional derivative pointwise."""
    if p.dim != field.grid.dim:
        raise ValueError(f"parameter dim {p.dim} != field dim {field.grid.dim}")
    if which == "force":
        return TensorField(field.grid, bulk_force_comps(field.data, p))
    if which == "jac_contract":
        _, jac = bulk_force_and_jac_comps(field.data, p)
        return TensorField(field.grid, jac)
    raise ValueError(f"which must be 'force' or 'jac_contract', got {which!r}")


def field_reduce(field: TensorField) -> FieldStats:
    """Sup/L2 norms and eigenvalue extrema over all lattice points."""
    grid = field.grid
    frob2 = frob2_comps(grid.dim, field.data)
    eigs = eigvals_comps(grid.dim, field.data)
    return FieldStats(
        sup_frob=float(np.sqrt(np.max(frob2))),
        sup_spectral=float(max(np.max(eigs[0]), -np.min(eigs[-1]))),
        l2_norm=float(np.sqrt(grid.h**grid.dim * np.sum(frob2))),
        min_eig=float(np.min(eigs[-1])),
        max_eig=float(np.max(eigs[0])),
    )


def elastic_energy(field: TensorField, c: float) -> float:
    """Gradient part of the energy from periodic forward differences.

    Squared differences are summed over every matrix entry, including the
    dependent ones (q21 = q12 etc., q33 = -q11 - q22), so the discrete
    value matches the all-entry continuum contraction.
    """
    grid = field.grid
    total = 0.0
    for ax in range(1, grid.dim + 1):
        diff = np.roll(field.data, -1, axis=ax) - field.data
        total += float(np.sum(frob2_comps(grid.dim, diff)))
    return 0.5 * c * grid.h**grid.dim * total / grid.h**2
