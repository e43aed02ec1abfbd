"""Pointwise algebra of symmetric traceless order-parameter tensors.

A tensor is stored by its independent components only: (q11, q12) in 2D
with q22 = -q11, and (q11, q12, q13, q22, q23) in 3D with
q33 = -q11 - q22.  Reconstruction therefore yields a matrix that is
symmetric and traceless by construction; products computed on the full
matrix are compressed back with a residual check.

All functions are pure and safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

N_COMPS = {2: 2, 3: 5}
COMP_NAMES = {2: ("q11", "q12"), 3: ("q11", "q12", "q13", "q22", "q23")}

#: Eigenvalue gap below which a principal axis is considered undefined.
DEGENERACY_TOL = 1e-9

#: Squared-norm floor below which biaxiality is a 0/0 form.
BIAXIALITY_FLOOR = 1e-12

#: Symmetry/trace residual allowed when compressing computed products.
PRODUCT_TOL = 1e-10


class AdmissibilityError(ValueError):
    """A matrix left the symmetric-traceless subspace by more than tol."""


class DegenerateTensorError(ValueError):
    """The requested quantity is undefined for this (near-)degenerate tensor."""


@dataclass(frozen=True, eq=False)
class QTensor:
    """A single symmetric traceless d x d tensor in compressed storage."""

    dim: int
    comps: np.ndarray

    def __post_init__(self) -> None:
        if self.dim not in N_COMPS:
            raise ValueError(f"dim must be 2 or 3, got {self.dim}")
        c = np.array(self.comps, dtype=float)
        if c.shape != (N_COMPS[self.dim],):
            raise ValueError(
                f"expected {N_COMPS[self.dim]} components for dim={self.dim}, "
                f"got shape {c.shape}"
            )
        c.flags.writeable = False
        object.__setattr__(self, "comps", c)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QTensor):
            return NotImplemented
        return self.dim == other.dim and np.array_equal(self.comps, other.comps)

    @classmethod
    def zero(cls, dim: int) -> "QTensor":
        return cls(dim, np.zeros(N_COMPS[dim]))


def full_matrix(q: QTensor) -> np.ndarray:
    """Reconstruct the dense d x d matrix from compressed storage."""
    if q.dim == 2:
        a, b = q.comps
        return np.array([[a, b], [b, -a]])
    q11, q12, q13, q22, q23 = q.comps
    return np.array(
        [
            [q11, q12, q13],
            [q12, q22, q23],
            [q13, q23, -(q11 + q22)],
        ]
    )


def compress(m: np.ndarray, tol: float = PRODUCT_TOL) -> QTensor:
    """Read independent components from a dense matrix.

    Rejects matrices whose symmetry or trace residual exceeds ``tol``;
    such a residual signals that a product left the admissible subspace.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] not in (2, 3):
        raise ValueError(f"expected a 2x2 or 3x3 matrix, got shape {m.shape}")
    sym_res = float(np.max(np.abs(m - m.T)))
    trace_res = abs(float(np.trace(m)))
    if sym_res > tol or trace_res > tol:
        raise AdmissibilityError(
            f"matrix outside admissible subspace: symmetry residual {sym_res:.3e}, "
            f"trace residual {trace_res:.3e}, tol {tol:.3e}"
        )
    if m.shape[0] == 2:
        return QTensor(2, np.array([m[0, 0], m[0, 1]]))
    return QTensor(3, np.array([m[0, 0], m[0, 1], m[0, 2], m[1, 1], m[1, 2]]))


def trace_pow(q: QTensor, p: int) -> float:
    """Trace of the p-th matrix power, p in {2, 3}.

    For p=2 this equals the squared Frobenius norm.  A 2D traceless
    symmetric tensor has eigenvalues +/-lam, so its cube trace is
    identically zero.
    """
    if p not in (2, 3):
        raise ValueError(f"p must be 2 or 3, got {p}")
    m = full_matrix(q)
    if p == 2:
        return float(np.sum(m * m))
    if q.dim == 2:
        return 0.0
    return float(np.sum((m @ m) * m))


def eigvals_comps(dim: int, comps: np.ndarray) -> np.ndarray:
    """Eigenvalues of compressed components, descending along axis 0.

    ``comps`` has shape (ncomp, ...); the result has shape (dim, ...).

    3D strategy: the clamped-arccos solution of the depressed cubic is
    accurate only for the root at a flat spot of the cosine, which is
    the extreme eigenvalue on the side selected by the sign of det.
    Invariant-based formulas lose half the digits on the other two
    whenever they nearly coincide, so instead the extreme root's
    eigenvector is formed by cross products and the remaining pair is
    read off the deflated complement block entry by entry, which stays
    accurate through degeneracies.  Everything is branch-free (np.where)
    and vectorizes over whole fields.
    """
    if dim == 2:
        r = np.hypot(comps[0], comps[1])
        return np.stack([r, -r])
    q11, q12, q13, q22, q23 = comps
    q33 = -(q11 + q22)
    t2 = q11 * q11 + q22 * q22 + q33 * q33 + 2.0 * (q12 * q12 + q13 * q13 + q23 * q23)
    det = (
        q11 * (q22 * q33 - q23 * q23)
        - q12 * (q12 * q33 - q23 * q13)
        + q13 * (q12 * q23 - q22 * q13)
    )
    # lam^3 - (t2/2) lam - det = 0; substitute lam = amp*cos(theta).
    amp = 2.0 * np.sqrt(t2 / 6.0)
    safe = np.where(amp > 0.0, amp, 1.0)
    arg = np.clip(4.0 * det / (safe * safe * safe), -1.0, 1.0)
    phi = np.arccos(arg) / 3.0
    top_branch = arg >= 0.0
    ext = np.where(top_branch, amp * np.cos(phi), amp * np.cos(phi + 2.0 * np.pi / 3.0))

    # eigenvector of the extreme root: largest cross product of rows of
    # Q - ext*I (the isolated root keeps this well conditioned)
    b11, b22, b33 = q11 - ext, q22 - ext, q33 - ext
    cx = [
        (q12 * q23 - q13 * b22, q13 * q12 - b11 * q23, b11 * b22 - q12 * q12),
        (q12 * b33 - q13 * q23, q13 * q13 - b11 * b33, b11 * q23 - q12 * q13),
        (b22 * b33 - q23 * q23, q23 * q13 - q12 * b33, q12 * q23 - b22 * q13),
    ]
    norms = [x * x + y * y + z * z for x, y, z in cx]
    best01 = norms[0] >= norms[1]
    vx = np.where(best01, cx[0][0], cx[1][0])
    vy = np.where(best01, cx[0][1], cx[1][1])
    vz = np.where(best01, cx[0][2], cx[1][2])
    nbest = np.where(best01, norms[0], norms[1])
    take2 = norms[2] > nbest
    vx = np.where(take2, cx[2][0], vx)
    vy = np.where(take2, cx[2][1], vy)
    vz = np.where(take2, cx[2][2], vz)
    nbest = np.where(take2, norms[2], nbest)
    nrm = np.sqrt(np.where(nbest > 0.0, nbest, 1.0))
    vx, vy, vz = vx / nrm, vy / nrm, vz / nrm

    # deflated pair: mean from the trace, half-gap from the entrywise
    # residual R = Q - ext*vv^T - mean*(I - vv^T) with |R|_F = gap*sqrt(2)
    mean = -0.5 * ext
    d = ext - mean
    r11 = q11 - mean - d * vx * vx
    r22 = q22 - mean - d * vy * vy
    r33 = q33 - mean - d * vz * vz
    r12 = q12 - d * vx * vy
    r13 = q13 - d * vx * vz
    r23 = q23 - d * vy * vz
    gap = np.sqrt(
        0.5 * (r11 * r11 + r22 * r22 + r33 * r33)
        + (r12 * r12 + r13 * r13 + r23 * r23)
    )
    hi, lo = mean + gap, mean - gap
    lam0 = np.where(top_branch, ext, hi)
    lam1 = np.where(top_branch, hi, lo)
    lam2 = np.where(top_branch, lo, ext)
    # guard the descending order against last-ulp branch noise
    a0, a1 = np.maximum(lam0, lam1), np.minimum(lam0, lam1)
    b1, b2 = np.maximum(a1, lam2), np.minimum(a1, lam2)
    c0, c1 = np.maximum(a0, b1), np.minimum(a0, b1)
    return np.stack([c0, c1, b2])


def eig_sym(q: QTensor) -> tuple[np.ndarray, float]:
    """Eigenvalues sorted descending, plus the spectral norm."""
    vals = eigvals_comps(q.dim, q.comps)
    return vals, float(max(vals[0], -vals[-1]))


def _fix_sign(v: np.ndarray) -> np.ndarray:
    for x in v:
        if abs(x) > 1e-12:
            return v if x > 0.0 else -v
    return v


def principal_axis(q: QTensor) -> np.ndarray:
    """Unit eigenvector of the largest eigenvalue.

    The sign is fixed so the first nonzero component is positive.
    Raises when the top two eigenvalues are closer than the degeneracy
    tolerance, in which case the orientation is meaningless.
    """
    vals, _ = eig_sym(q)
    if vals[0] - vals[1] <= DEGENERACY_TOL:
        raise DegenerateTensorError(
            f"top eigenvalues separated by {vals[0] - vals[1]:.3e} "
            f"<= {DEGENERACY_TOL:.0e}; principal axis undefined"
        )
    lam = vals[0]
    if q.dim == 2:
        a, b = q.comps
        cand1 = np.array([b, lam - a])
        cand2 = np.array([lam + a, b])
        v = cand1 if np.dot(cand1, cand1) >= np.dot(cand2, cand2) else cand2
    else:
        b_mat = full_matrix(q) - lam * np.eye(3)
        crosses = [
            np.cross(b_mat[0], b_mat[1]),
            np.cross(b_mat[0], b_mat[2]),
            np.cross(b_mat[1], b_mat[2]),
        ]
        norms = [np.dot(c, c) for c in crosses]
        v = crosses[int(np.argmax(norms))]
    nrm = float(np.linalg.norm(v))
    if nrm == 0.0:
        raise DegenerateTensorError("null eigenvector candidate; spectrum degenerate")
    return _fix_sign(v / nrm)


def biaxiality(q: QTensor) -> float:
    """Biaxiality measure in [0, 1]: 0 uniaxial, 1 maximally biaxial.

    Computed as 1 - 6 tr(Q^3)^2 / tr(Q^2)^3; undefined (0/0) for the
    zero tensor, signalled by DegenerateTensorError below the norm floor.
    """
    if q.dim != 3:
        raise ValueError("biaxiality is only defined for dim=3 tensors")
    t2 = trace_pow(q, 2)
    if t2 <= BIAXIALITY_FLOOR:
        raise DegenerateTensorError(
            f"tr(Q^2) = {t2:.3e} below floor {BIAXIALITY_FLOOR:.0e}"
        )
    t3 = trace_pow(q, 3)
    return 1.0 - 6.0 * t3 * t3 / (t2 * t2 * t2)
