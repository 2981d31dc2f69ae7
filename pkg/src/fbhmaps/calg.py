"""Small dense complex linear algebra.

Everything here works on plain ``numpy`` complex arrays; dimensions in this
package never exceed a dozen or so, so nothing is blocked or sparse.
"""

from dataclasses import dataclass

import numpy as np

from .errors import AmbiguousFit, DimensionMismatch, NotOrthonormal

ALG_TOL = 1e-10
FIT_TOL = 1e-8
GAP_TOL = 1e-8


@dataclass(frozen=True)
class HermitianSignature:
    p: int
    q: int

    def __post_init__(self):
        if self.p < 1 or self.q < 0:
            raise ValueError(f"invalid signature ({self.p}, {self.q})")

    @property
    def dim(self):
        return self.p + self.q

    def matrix(self):
        return np.diag(np.r_[np.ones(self.p), -np.ones(self.q)]).astype(complex)


def as_cvector(x):
    v = np.asarray(x, dtype=complex)
    if v.ndim != 1:
        raise DimensionMismatch(f"expected a vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite entries")
    return v


def as_cmatrix(m):
    a = np.asarray(m, dtype=complex)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def hdot(x, y):
    """Hermitian product <x, y> = sum x_j conj(y_j), linear in ``x``.

    Works along the last axis so batches of vectors broadcast.
    """
    return np.sum(np.asarray(x) * np.conj(y), axis=-1)


def hform_eval(sig, x):
    x = np.asarray(x, dtype=complex)
    if x.shape[-1] != sig.dim:
        raise DimensionMismatch(f"vector length {x.shape[-1]} != p+q = {sig.dim}")
    a = np.abs(x) ** 2
    return np.sum(a[..., : sig.p], axis=-1) - np.sum(a[..., sig.p :], axis=-1)


def h_residual(M, sig):
    """Max-norm of M J M^dagger - J."""
    M = as_cmatrix(M)
    if M.shape != (sig.dim, sig.dim):
        raise DimensionMismatch(f"matrix shape {M.shape} does not match signature {sig}")
    J = sig.matrix()
    return float(np.max(np.abs(M @ J @ M.conj().T - J)))


def is_h_unitary(M, sig, tol=ALG_TOL):
    """Membership in U(p, q); with q = 0 this is plain unitarity."""
    return h_residual(M, sig) < tol


def unitarity_residual(M):
    M = as_cmatrix(M)
    return float(np.max(np.abs(M.conj().T @ M - np.eye(M.shape[1]))))


def unitary_complete(cols, tol=ALG_TOL):
    """Extend ``k`` orthonormal columns in C^N to an N x N unitary.

    The first ``k`` columns of the result are the input columns, bit for bit.
    """
    C = as_cmatrix(cols)
    N, k = C.shape
    if k > N:
        raise DimensionMismatch(f"{k} columns cannot be orthonormal in dimension {N}")
    res = unitarity_residual(C)
    if res > tol:
        raise NotOrthonormal(f"input columns not orthonormal (residual {res:.3e})")
    if k == N:
        return C.copy()
    # Orthonormal basis of the complement: trailing left singular vectors of C.
    u, _, _ = np.linalg.svd(C, full_matrices=True)
    rest = u[:, k:]
    # One re-orthogonalisation pass against C cleans up round-off.
    rest = rest - C @ (C.conj().T @ rest)
    rest, _ = np.linalg.qr(rest)
    return np.hstack([C, rest])


def polar_unitary(A):
    """Closest unitary to ``A`` in Frobenius norm, and the distance to it."""
    A = as_cmatrix(A)
    u, _, vh = np.linalg.svd(A)
    U = u @ vh
    return U, float(np.linalg.norm(A - U))


def canonical_phase(x):
    """Rotate a homogeneous vector/matrix so its largest-|entry| is real positive.

    Ties go to the lowest (row-major) index; magnitudes are compared after
    rounding to 12 significant digits so round-off cannot flip the choice.
    """
    x = np.asarray(x, dtype=complex)
    mags = np.abs(x).ravel()
    top = mags.max()
    if top == 0:
        return x.copy()
    idx = int(np.argmax(mags >= top * (1 - 1e-12)))
    pivot = x.ravel()[idx]
    out = x * (abs(pivot) / pivot)
    out.flat[idx] = abs(pivot)
    return out


def min_right_singular(M, gap_tol=GAP_TOL):
    """Unit vector minimising ||M x||, with the canonical phase applied.

    Raises ``AmbiguousFit`` when the two smallest singular values are within
    ``gap_tol`` of each other relative to the largest one.
    """
    M = as_cmatrix(M)
    rows, cols = M.shape
    if rows < cols:
        raise DimensionMismatch(f"need rows >= cols, got {M.shape}")
    _, s, vh = np.linalg.svd(M, full_matrices=False)
    if cols >= 2 and (s[-2] - s[-1]) <= gap_tol * max(s[0], np.finfo(float).tiny):
        raise AmbiguousFit(
            f"smallest singular values {s[-2]:.3e}, {s[-1]:.3e} are not separated"
        )
    x = vh[-1].conj()
    return canonical_phase(x)
