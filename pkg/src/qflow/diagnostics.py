"""Discrete energy, solution differences, and temporal-order studies."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid_field import (
    GridMismatchError,
    TensorField,
    elastic_energy,
    field_reduce,
)
from .nonlinearity import ModelParams, frob2_comps


@dataclass(frozen=True)
class SolutionDiff:
    sup_frob: float
    sup_spectral: float


@dataclass(frozen=True)
class ConvergenceTable:
    """Successive-refinement errors at fixed time and their decay rates.

    ``errors_*[k]`` is the sup-norm difference between the solutions at
    ``taus[k]`` and ``taus[k+1]``; ``rates_*[k]`` is log2 of the ratio of
    consecutive errors, the usual temporal-order estimate.
    """

    taus: np.ndarray
    errors_frob: np.ndarray
    errors_spectral: np.ndarray
    rates_frob: np.ndarray
    rates_spectral: np.ndarray


def _det_comps(comps: np.ndarray) -> np.ndarray:
    q11, q12, q13, q22, q23 = comps
    q33 = -(q11 + q22)
    return (
        q11 * (q22 * q33 - q23 * q23)
        - q12 * (q12 * q33 - q23 * q13)
        + q13 * (q12 * q23 - q22 * q13)
    )


def energy(field: TensorField, p: ModelParams) -> float:
    """Total discrete energy: gradient part plus the bulk polynomial.

    The bulk density is alpha/2 tr(Q^2) - beta/3 tr(Q^3)
    + gamma/4 tr(Q^2)^2 integrated with the lattice cell volume; the
    quartic term is the integral of tr(Q^2)^2, not the squared integral.
    In 2D the cubic trace vanishes identically.
    """
    grid = field.grid
    t2 = frob2_comps(grid.dim, field.data)
    density = 0.5 * p.alpha * t2 + 0.25 * p.gamma * t2 * t2
    if grid.dim == 3 and p.beta != 0.0:
        # tr(Q^3) = 3 det(Q) for traceless 3x3 matrices.
        density = density - p.beta * _det_comps(field.data)
    return elastic_energy(field, p.c) + grid.h**grid.dim * float(np.sum(density))


def solution_difference(a: TensorField, b: TensorField) -> SolutionDiff:
    """Sup Frobenius and sup spectral norms of the pointwise difference."""
    if a.grid != b.grid:
        raise GridMismatchError("fields live on different grids")
    stats = field_reduce(TensorField(a.grid, a.data - b.data))
    return SolutionDiff(sup_frob=stats.sup_frob, sup_spectral=stats.sup_spectral)


def rates_from_errors(errors: np.ndarray) -> np.ndarray:
    """log2 of successive error ratios; one entry fewer than ``errors``."""
    errors = np.asarray(errors, dtype=float)
    return np.log2(errors[:-1] / errors[1:])


def convergence_study(
    q0: TensorField,
    scheme,
    p: ModelParams,
    tau_max: float,
    levels: int,
    t_final: float,
    kind: str = "fd_central",
) -> ConvergenceTable:
    """Successive halving study: solve at tau_max / 2^k, difference at t_final.

    All levels share the spatial grid, so the differences isolate the
    temporal error.  Needs at least 3 levels for one rate entry.
    """
    from .integrators import simulate

    if levels < 3:
        raise ValueError(f"levels must be >= 3 for rates, got {levels}")
    taus = tau_max / 2.0 ** np.arange(levels)
    if abs(round(t_final / taus[-1]) * taus[-1] - t_final) > 1e-12:
        raise ValueError(
            f"t_final={t_final} is not an integer multiple of the smallest tau"
        )
    solutions = []
    for tau in taus:
        nsteps = round(t_final / tau)
        report = simulate(
            q0, scheme, p, tau, t_final, monitor_every=max(nsteps, 1), kind=kind
        )
        solutions.append(report.final_field)
    diffs = [
        solution_difference(solutions[k], solutions[k + 1]) for k in range(levels - 1)
    ]
    errors_frob = np.array([d.sup_frob for d in diffs])
    errors_spectral = np.array([d.sup_spectral for d in diffs])
    return ConvergenceTable(
        taus=taus,
        errors_frob=errors_frob,
        errors_spectral=errors_spectral,
        rates_frob=rates_from_errors(errors_frob),
        rates_spectral=rates_from_errors(errors_spectral),
    )
