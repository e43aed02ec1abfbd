"""Independent reference implementations used to verify the library.

These deliberately avoid the library's vectorized code paths: they loop
over points, use LAPACK eigensolvers, finite differences, and explicit
quadrature so that agreement is meaningful.
"""

from __future__ import annotations

import numpy as np

from qflow import (
    ModelParams,
    PeriodicGrid,
    QTensor,
    TensorField,
    bulk_force,
    full_matrix,
)
from qflow.qtensor import N_COMPS


def random_qtensor(rng: np.random.Generator, dim: int, scale: float = 1.0) -> QTensor:
    comps = rng.uniform(-scale, scale, N_COMPS[dim])
    return QTensor(dim, comps)


def random_field(rng: np.random.Generator, grid: PeriodicGrid, scale: float = 1.0) -> TensorField:
    data = rng.uniform(-scale, scale, (grid.ncomp,) + grid.shape)
    return TensorField(grid, data)


def random_rotation(rng: np.random.Generator, dim: int) -> np.ndarray:
    m = rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(m)
    return q * np.sign(np.diag(r))


def fd_jac_contract(q: QTensor, p: ModelParams, eps: float = 1e-5) -> np.ndarray:
    """Centered finite-difference derivative of the force along itself."""
    f = bulk_force(q, p)
    plus = bulk_force(QTensor(q.dim, q.comps + eps * f.comps), p)
    minus = bulk_force(QTensor(q.dim, q.comps - eps * f.comps), p)
    return (full_matrix(plus) - full_matrix(minus)) / (2.0 * eps)


def rk4_point(q: QTensor, p: ModelParams, dt: float, nsteps: int) -> QTensor:
    """Classical RK4 on the single-tensor flow dQ/dt = f(Q)."""
    comps = q.comps.copy()
    for _ in range(nsteps):
        k1 = bulk_force(QTensor(q.dim, comps), p).comps
        k2 = bulk_force(QTensor(q.dim, comps + 0.5 * dt * k1), p).comps
        k3 = bulk_force(QTensor(q.dim, comps + 0.5 * dt * k2), p).comps
        k4 = bulk_force(QTensor(q.dim, comps + dt * k3), p).comps
        comps = comps + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return QTensor(q.dim, comps)


def pointwise_map(field: TensorField, op) -> TensorField:
    """Apply a QTensor -> QTensor operation with an explicit point loop."""
    grid = field.grid
    out = np.empty_like(field.data)
    for idx in np.ndindex(*grid.shape):
        out[(slice(None),) + idx] = op(field.point(*idx)).comps
    return TensorField(grid, out)


def scan_extrema(field: TensorField):
    """Norm/eigenvalue extrema via a sequential point-by-point scan.

    Applies the library's single-point kernels one lattice point at a
    time, so any cross-point vectorization or reduction bug in the field
    path shows up as a bitwise mismatch.  Correctness of the per-point
    kernels themselves is established by the LAPACK and trace tests.
    """
    from qflow import eig_sym
    from qflow.nonlinearity import frob2_comps

    grid = field.grid
    frob2 = np.empty(grid.shape)
    sup_spectral = -np.inf
    min_eig = np.inf
    max_eig = -np.inf
    for idx in np.ndindex(*grid.shape):
        q = field.point(*idx)
        frob2[idx] = frob2_comps(grid.dim, q.comps)
        vals, spec = eig_sym(q)
        sup_spectral = max(sup_spectral, spec)
        min_eig = min(min_eig, vals[-1])
        max_eig = max(max_eig, vals[0])
    return frob2, sup_spectral, min_eig, max_eig


def lapack_eigvals(q: QTensor) -> np.ndarray:
    """Descending eigenvalues from LAPACK, independent of the closed form."""
    return np.linalg.eigvalsh(full_matrix(q))[::-1]


def elastic_energy_direct(field: TensorField, c: float) -> float:
    """Forward-difference gradient energy summed entry by entry per point."""
    grid = field.grid
    h = grid.h
    total = 0.0
    for idx in np.ndindex(*grid.shape):
        m = full_matrix(field.point(*idx))
        for ax in range(grid.dim):
            shifted = list(idx)
            shifted[ax] = (shifted[ax] + 1) % grid.n
            m_next = full_matrix(field.point(*shifted))
            diff = (m_next - m) / h
            total += float(np.sum(diff * diff))
    return 0.5 * c * h**grid.dim * total
