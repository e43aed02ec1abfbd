"""Bulk force of the tensor gradient flow and its self-directional derivative.

The force is f(Q) = -alpha Q + beta (Q^2 - tr(Q^2)/d I) - gamma tr(Q^2) Q.
Its derivative contracted with f itself has the closed form

    (df/dQ)(Q):f(Q) = (-alpha - gamma tr(Q^2)) f(Q) - 2 gamma (f(Q):Q) Q
                      + 2 beta (f(Q) Q - (f(Q):Q)/3 I),

which is what the second-order steps need; the full fourth-order
derivative tensor is never materialized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qtensor import PRODUCT_TOL, QTensor, compress, full_matrix

try:
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    _HAVE_NUMBA = False


@dataclass(frozen=True)
class ModelParams:
    """Material coefficients of the flow.

    ``alpha`` is signed (negative below the transition temperature);
    ``beta`` must vanish in 2D where the quadratic term is identically
    zero.  ``gamma = 0`` is tolerated so linear-force test configurations
    can be built, but bound constants require gamma > 0.
    """

    c: float
    alpha: float
    beta: float
    gamma: float
    dim: int

    def __post_init__(self) -> None:
        if self.dim not in (2, 3):
            raise ValueError(f"dim must be 2 or 3, got {self.dim}")
        if self.c <= 0.0:
            raise ValueError(f"c must be positive, got {self.c}")
        if self.beta < 0.0:
            raise ValueError(f"beta must be nonnegative, got {self.beta}")
        if self.gamma < 0.0:
            raise ValueError(f"gamma must be nonnegative, got {self.gamma}")
        if self.dim == 2 and self.beta != 0.0:
            raise ValueError("beta must be 0 in 2D (the quadratic term vanishes)")


@dataclass(frozen=True)
class MbpConstants:
    """Bound radius and advisory step limit for norm preservation.

    ``b`` is beta^2/gamma^2 - 2 alpha/gamma; ``a`` is the Frobenius-norm
    radius preserved by the schemes; ``cf_hat`` and ``c_partial`` are
    conservative polynomial coefficient bounds at radius ``a`` entering
    the advisory step bound ``tau0``.  The bound is sufficient, not
    necessary: larger steps may still behave well and are only warned
    about.
    """

    b: float
    a: float
    cf_hat: float
    c_partial: float
    tau0: float


def _force_matrix(m: np.ndarray, p: ModelParams) -> np.ndarray:
    t2 = float(np.sum(m * m))
    out = (-p.alpha - p.gamma * t2) * m
    if p.beta != 0.0:
        out = out + p.beta * (m @ m - (t2 / p.dim) * np.eye(p.dim))
    return out


def bulk_force(q: QTensor, p: ModelParams) -> QTensor:
    """Pointwise bulk force f(Q); exactly traceless after compression."""
    if p.dim != q.dim:
        raise ValueError(f"parameter dim {p.dim} != tensor dim {q.dim}")
    return compress(_force_matrix(full_matrix(q), p), PRODUCT_TOL)


def jac_contract(q: QTensor, p: ModelParams) -> QTensor:
    """Directional derivative of the bulk force along itself, (df/dQ):f."""
    if p.dim != q.dim:
        raise ValueError(f"parameter dim {p.dim} != tensor dim {q.dim}")
    m = full_matrix(q)
    f = _force_matrix(m, p)
    t2 = float(np.sum(m * m))
    f_dot_q = float(np.sum(f * m))
    out = (-p.alpha - p.gamma * t2) * f - 2.0 * p.gamma * f_dot_q * m
    if p.beta != 0.0:
        out = out + 2.0 * p.beta * (f @ m - (f_dot_q / 3.0) * np.eye(3))
    return compress(out, PRODUCT_TOL)


def frob2_comps(dim: int, comps: np.ndarray) -> np.ndarray:
    """Squared Frobenius norm (all-entry sum of squares) per lattice point."""
    if dim == 2:
        return 2.0 * (comps[0] * comps[0] + comps[1] * comps[1])
    q11, q12, q13, q22, q23 = comps
    q33 = -(q11 + q22)
    return (
        q11 * q11
        + q22 * q22
        + q33 * q33
        + 2.0 * (q12 * q12 + q13 * q13 + q23 * q23)
    )


def _bulk_force_comps_numpy(comps: np.ndarray, p: ModelParams) -> np.ndarray:
    t2 = frob2_comps(p.dim, comps)
    scale = -p.alpha - p.gamma * t2
    if p.dim == 2:
        return scale * comps
    q11, q12, q13, q22, q23 = comps
    q33 = -(q11 + q22)
    out = scale * comps
    if p.beta != 0.0:
        third = t2 / 3.0
        out[0] += p.beta * (q11 * q11 + q12 * q12 + q13 * q13 - third)
        out[1] += p.beta * (q11 * q12 + q12 * q22 + q13 * q23)
        out[2] += p.beta * (q11 * q13 + q12 * q23 + q13 * q33)
        out[3] += p.beta * (q12 * q12 + q22 * q22 + q23 * q23 - third)
        out[4] += p.beta * (q12 * q13 + q22 * q23 + q23 * q33)
    return out


def _bulk_force_and_jac_comps_numpy(
    comps: np.ndarray, p: ModelParams
) -> tuple[np.ndarray, np.ndarray]:
    t2 = frob2_comps(p.dim, comps)
    f = _bulk_force_comps_numpy(comps, p)
    if p.dim == 2:
        fq = 2.0 * (f[0] * comps[0] + f[1] * comps[1])
    else:
        f33 = -(f[0] + f[3])
        q33 = -(comps[0] + comps[3])
        fq = (
            f[0] * comps[0]
            + f[3] * comps[3]
            + f33 * q33
            + 2.0 * (f[1] * comps[1] + f[2] * comps[2] + f[4] * comps[4])
        )
    jac = (-p.alpha - p.gamma * t2) * f - (2.0 * p.gamma) * fq * comps
    if p.dim == 3 and p.beta != 0.0:
        q11, q12, q13, q22, q23 = comps
        f11, f12, f13, f22, f23 = f
        q33 = -(q11 + q22)
        third = fq / 3.0
        jac[0] += 2.0 * p.beta * (f11 * q11 + f12 * q12 + f13 * q13 - third)
        jac[1] += 2.0 * p.beta * (f11 * q12 + f12 * q22 + f13 * q23)
        jac[2] += 2.0 * p.beta * (f11 * q13 + f12 * q23 + f13 * q33)
        jac[3] += 2.0 * p.beta * (f12 * q12 + f22 * q22 + f23 * q23 - third)
        jac[4] += 2.0 * p.beta * (f12 * q13 + f22 * q23 + f23 * q33)
    return f, jac


if _HAVE_NUMBA:

    @numba.njit(cache=True)
    def _force2_kernel(c, alpha, gamma, out):
        for i in range(c.shape[1]):
            q11, q12 = c[0, i], c[1, i]
            s = -alpha - gamma * (2.0 * (q11 * q11 + q12 * q12))
            out[0, i] = s * q11
            out[1, i] = s * q12

    @numba.njit(cache=True)
    def _force3_kernel(c, alpha, beta, gamma, out):
        for i in range(c.shape[1]):
            q11, q12, q13 = c[0, i], c[1, i], c[2, i]
            q22, q23 = c[3, i], c[4, i]
            q33 = -(q11 + q22)
            t2 = q11 * q11 + q22 * q22 + q33 * q33 + 2.0 * (
                q12 * q12 + q13 * q13 + q23 * q23
            )
            s = -alpha - gamma * t2
            third = t2 / 3.0
            out[0, i] = s * q11 + beta * (q11 * q11 + q12 * q12 + q13 * q13 - third)
            out[1, i] = s * q12 + beta * (q11 * q12 + q12 * q22 + q13 * q23)
            out[2, i] = s * q13 + beta * (q11 * q13 + q12 * q23 + q13 * q33)
            out[3, i] = s * q22 + beta * (q12 * q12 + q22 * q22 + q23 * q23 - third)
            out[4, i] = s * q23 + beta * (q12 * q13 + q22 * q23 + q23 * q33)

    @numba.njit(cache=True)
    def _force_jac2_kernel(c, alpha, gamma, f_out, j_out):
        for i in range(c.shape[1]):
            q11, q12 = c[0, i], c[1, i]
            t2 = 2.0 * (q11 * q11 + q12 * q12)
            s = -alpha - gamma * t2
            f11, f12 = s * q11, s * q12
            fq = 2.0 * (f11 * q11 + f12 * q12)
            f_out[0, i], f_out[1, i] = f11, f12
            j_out[0, i] = s * f11 - 2.0 * gamma * fq * q11
            j_out[1, i] = s * f12 - 2.0 * gamma * fq * q12

    @numba.njit(cache=True)
    def _force_jac3_kernel(c, alpha, beta, gamma, f_out, j_out):
        for i in range(c.shape[1]):
            q11, q12, q13 = c[0, i], c[1, i], c[2, i]
            q22, q23 = c[3, i], c[4, i]
            q33 = -(q11 + q22)
            t2 = q11 * q11 + q22 * q22 + q33 * q33 + 2.0 * (
                q12 * q12 + q13 * q13 + q23 * q23
            )
            s = -alpha - gamma * t2
            third = t2 / 3.0
            f11 = s * q11 + beta * (q11 * q11 + q12 * q12 + q13 * q13 - third)
            f12 = s * q12 + beta * (q11 * q12 + q12 * q22 + q13 * q23)
            f13 = s * q13 + beta * (q11 * q13 + q12 * q23 + q13 * q33)
            f22 = s * q22 + beta * (q12 * q12 + q22 * q22 + q23 * q23 - third)
            f23 = s * q23 + beta * (q12 * q13 + q22 * q23 + q23 * q33)
            f33 = -(f11 + f22)
            fq = f11 * q11 + f22 * q22 + f33 * q33 + 2.0 * (
                f12 * q12 + f13 * q13 + f23 * q23
            )
            fq3 = fq / 3.0
            tg = 2.0 * gamma
            tb = 2.0 * beta
            f_out[0, i], f_out[1, i], f_out[2, i] = f11, f12, f13
            f_out[3, i], f_out[4, i] = f22, f23
            j_out[0, i] = s * f11 - tg * fq * q11 + tb * (
                f11 * q11 + f12 * q12 + f13 * q13 - fq3
            )
            j_out[1, i] = s * f12 - tg * fq * q12 + tb * (
                f11 * q12 + f12 * q22 + f13 * q23
            )
            j_out[2, i] = s * f13 - tg * fq * q13 + tb * (
                f11 * q13 + f12 * q23 + f13 * q33
            )
            j_out[3, i] = s * f22 - tg * fq * q22 + tb * (
                f12 * q12 + f22 * q22 + f23 * q23 - fq3
            )
            j_out[4, i] = s * f23 - tg * fq * q23 + tb * (
                f12 * q13 + f22 * q23 + f23 * q33
            )


def bulk_force_comps(comps: np.ndarray, p: ModelParams) -> np.ndarray:
    """Vectorized bulk force on component planes, shape (ncomp, ...).

    Uses a fused single-pass kernel when numba is available; the pure
    numpy implementation is the fallback and the testing reference.
    """
    if not (_HAVE_NUMBA and comps.flags.c_contiguous):
        return _bulk_force_comps_numpy(comps, p)
    flat = comps.reshape(comps.shape[0], -1)
    out = np.empty_like(flat)
    if p.dim == 2:
        _force2_kernel(flat, p.alpha, p.gamma, out)
    else:
        _force3_kernel(flat, p.alpha, p.beta, p.gamma, out)
    return out.reshape(comps.shape)


def bulk_force_and_jac_comps(
    comps: np.ndarray, p: ModelParams
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized (f(Q), (df/dQ):f(Q)) on component planes.

    Shares the force evaluation between the two outputs, which the
    second-order steps consume together.
    """
    if not (_HAVE_NUMBA and comps.flags.c_contiguous):
        return _bulk_force_and_jac_comps_numpy(comps, p)
    flat = comps.reshape(comps.shape[0], -1)
    f_out = np.empty_like(flat)
    j_out = np.empty_like(flat)
    if p.dim == 2:
        _force_jac2_kernel(flat, p.alpha, p.gamma, f_out, j_out)
    else:
        _force_jac3_kernel(flat, p.alpha, p.beta, p.gamma, f_out, j_out)
    return f_out.reshape(comps.shape), j_out.reshape(comps.shape)


def mbp_constants(p: ModelParams, sup_q0_frob: float) -> MbpConstants:
    """Norm-preservation radius and advisory step bound for a run.

    The radius is a = max(sup||Q0||_F, sqrt(max(b, 0))) so both
    hypotheses b <= a^2 and ||Q0||_F <= a hold by construction.  The
    coefficient bounds are conservative closed-form estimates at radius
    a; over-estimating them only makes the step advice more cautious.
    """
    if p.gamma <= 0.0:
        raise ValueError(f"gamma must be positive, got {p.gamma}")
    if sup_q0_frob < 0.0:
        raise ValueError(f"sup_q0_frob must be nonnegative, got {sup_q0_frob}")
    b = (p.beta / p.gamma) ** 2 - 2.0 * p.alpha / p.gamma
    a = max(sup_q0_frob, math.sqrt(max(b, 0.0)))
    cf_base = abs(p.alpha) + 2.0 * p.beta * a + p.gamma * a * a
    cf_hat = max(cf_base, 0.5 * p.gamma * abs(2.0 * a * a - b))
    c_partial = cf_base * (
        abs(p.alpha)
        + 3.0 * p.gamma * a * a
        + 2.0 * p.beta * a * (1.0 + math.sqrt(3.0) / 3.0)
    )
    tau0 = max(p.gamma * (a * a - b) / (cf_hat**2 + c_partial**2 + 1.0), 0.0)
    return MbpConstants(b=b, a=a, cf_hat=cf_hat, c_partial=c_partial, tau0=tau0)
