"""Ball automorphisms as projective actions of indefinite-unitary matrices.

A point ``x`` of the ball B^d is lifted to ``[1, x]``; a matrix ``M`` with
``M^H J M = c J`` (``J = diag(1, -1, ..., -1)``, ``c > 0``) acts by
multiplication and dehomogenisation. Matrices are only meaningful up to a
complex scalar, so comparisons are done on actions.

For an automorphism fixing Q = (0, ..., 0, 1) the representative is chosen
with ``M^H J M = J`` and with the eigenvalue ``lam`` at Q purely imaginary,
``Im lam > 0``. This is the same as asking ``lam (a_last - a0) = 1`` for the
first-column entries ``a0 = M[0, 0]`` and ``a_last = M[d, 0]``, and it makes
``-1/lam^2 = 1/|lam|^2`` a positive real number.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from . import calg
from .errors import AmbiguousFit, DimensionMismatch, InvalidTransform, NotBallAut, NotFixingQ

FIX_TOL = 1e-9
BALL_AUT_TOL = 1e-6


def jmat(d):
    """J = diag(1, -1, ..., -1) of size d + 1."""
    return calg.HermitianSignature(1, d).matrix()


@dataclass(frozen=True)
class ProjectiveAut:
    """Projective map of balls B^{d_in} -> B^{d_out} given by a (d_out+1) x (d_in+1) matrix.

    Square matrices are ball automorphisms; rectangular ones are the linear
    isometric embeddings needed for the non-equidimensional case.
    """

    M: np.ndarray
    fit_residual: float | None = field(default=None, compare=False)

    def __post_init__(self):
        M = calg.as_cmatrix(self.M)
        if min(M.shape) < 2:
            raise DimensionMismatch(f"matrix too small: {M.shape}")
        object.__setattr__(self, "M", M)

    @property
    def d_in(self):
        return self.M.shape[1] - 1

    @property
    def d_out(self):
        return self.M.shape[0] - 1

    def form_constant(self):
        """Real ``c`` with ``M^H J M ~ c J``, read off the (0, 0) entry."""
        G = self.M.conj().T @ jmat(self.d_out) @ self.M
        return float(G[0, 0].real)

    def h_residual(self):
        """Max-norm of ``M^H J M / c - J`` (zero for an exact ball map)."""
        c = self.form_constant()
        if not c > 0:
            return np.inf
        G = self.M.conj().T @ jmat(self.d_out) @ self.M
        return float(np.max(np.abs(G / c - jmat(self.d_in))))

    def normalized(self):
        """Representative with ``M^H J M = J`` and canonical phase."""
        c = self.form_constant()
        if not c > 0:
            raise NotBallAut(f"form constant {c:.3e} is not positive")
        return replace(self, M=calg.canonical_phase(self.M / np.sqrt(c)))

    def __matmul__(self, other):
        return ProjectiveAut(self.M @ other.M)

    def __call__(self, x):
        return act(self, x)


def act(T, x):
    x = np.asarray(x, dtype=complex)
    if x.shape[-1] != T.d_in:
        raise DimensionMismatch(f"point of dimension {x.shape[-1]}, map expects {T.d_in}")
    X = np.concatenate([np.ones(x.shape[:-1] + (1,), dtype=complex), x], axis=-1)
    Y = X @ T.M.T
    den = Y[..., 0]
    if np.any(np.abs(den) < 1e-14):
        raise InvalidTransform("point is sent to the hyperplane at infinity")
    return Y[..., 1:] / den[..., None]


def identity(d):
    return ProjectiveAut(np.eye(d + 1))


def psi_alpha(alpha, d):
    """The ball automorphism z1 -> (z1 + alpha)/(1 + conj(alpha) z1), scaled on the rest."""
    alpha = complex(alpha)
    if abs(alpha) >= 1:
        raise ValueError(f"|alpha| must be < 1, got {abs(alpha)}")
    if d < 1:
        raise ValueError("d must be >= 1")
    beta = np.sqrt(1 - abs(alpha) ** 2)
    M = np.eye(d + 1, dtype=complex)
    M[:2, :2] = np.array([[1, np.conj(alpha)], [alpha, 1]]) / beta
    return ProjectiveAut(M)


def unitary_block(A):
    """Ball automorphism x -> A x for a unitary (or isometric) ``A``."""
    A = calg.as_cmatrix(A)
    M = np.zeros((A.shape[0] + 1, A.shape[1] + 1), dtype=complex)
    M[0, 0] = 1
    M[1:, 1:] = A
    return ProjectiveAut(M)


def base_point(d):
    q = np.zeros(d, dtype=complex)
    q[-1] = 1
    return q


def fixes_q(T, tol=FIX_TOL):
    return float(np.max(np.abs(act(T, base_point(T.d_in)) - base_point(T.d_out)))) < tol


def row_identities(M):
    """Residuals of the row identities of ``M J M^H = J``.

    Returns ``(first_row, other_rows, off_diagonal)``: the deviations of
    ``|m00|^2 - sum|m0i|^2`` from 1, of the analogous quantity from -1 for
    the remaining rows, and the largest off-diagonal form value. ``M`` is
    normalised by its form constant first.
    """
    T = ProjectiveAut(M)
    c = T.form_constant()
    M = T.M / np.sqrt(c)
    G = M @ jmat(T.d_out) @ M.conj().T
    first = abs(G[0, 0] - 1)
    others = float(np.max(np.abs(np.diag(G)[1:] + 1)))
    off = float(np.max(np.abs(G - np.diag(np.diag(G)))))
    return float(first), others, off


@dataclass(frozen=True)
class FixerFrame:
    """Normalised matrix of a map fixing Q with its first-column data."""

    M: np.ndarray
    lam: complex
    a0: complex
    a_last: complex
    column: np.ndarray
    form_constant: float

    @property
    def kappa(self):
        return -1.0 / self.lam**2

    def relation_residual(self):
        """|lam conj(a0 - a_last) + conj(lam) (a0 - a_last) - 2|."""
        d = self.a0 - self.a_last
        return abs(self.lam * np.conj(d) + np.conj(self.lam) * d - 2)

    def det_product(self):
        """lam (a_last - a0); equals 1 under the chosen phase."""
        return self.lam * (self.a_last - self.a0)

    def constraint_residual(self):
        """|2 lam - 4 a0 - 2/lam|, zero for the conjugated canonical maps."""
        return abs(2 * self.lam - 4 * self.a0 - 2 / self.lam)


def fixer_frame(T, tol=FIX_TOL):
    """Normalise a map fixing Q (square or rectangular) and read off lam, a0, a_last."""
    if not fixes_q(T, tol):
        raise NotFixingQ("the map does not fix Q = (0, ..., 0, 1)")
    c = T.form_constant()
    if not c > 0:
        raise NotBallAut(f"form constant {c:.3e} is not positive")
    M = T.M / np.sqrt(c)
    dl = T.d_out
    lam = M[0, 0] + M[0, T.d_in]
    p = lam * (M[dl, 0] - M[0, 0])
    # p has unit modulus for an exact J-isometry; rotating by sqrt(conj p) makes it 1.
    rot = np.sqrt(np.conj(p) / abs(p))
    if (rot * lam).imag < 0:
        rot = -rot
    M = rot * M
    lam = M[0, 0] + M[0, T.d_in]
    return FixerFrame(M, complex(lam), complex(M[0, 0]), complex(M[dl, 0]),
                      M[1:dl, 0].copy(), c)


@dataclass(frozen=True)
class CanonicalParams:
    A: np.ndarray
    a0: complex
    a: np.ndarray
    lam: complex
    diagnostics: dict = field(default_factory=dict, compare=False)

    @property
    def kappa(self):
        return -1.0 / self.lam**2


def canonical_form(T, tol=FIX_TOL, block_tol=BALL_AUT_TOL):
    """Split an automorphism fixing Q into a unitary block and the normal-form matrix.

    The returned ``A, a0, a, lam`` rebuild ``T`` (up to a scalar) through
    ``from_canonical``. Diagnostics record the unitary-projection distance of
    the middle block, the determinant identity and the row relations.
    """
    if T.d_in != T.d_out:
        raise DimensionMismatch("canonical_form needs a square matrix")
    fr = fixer_frame(T, tol)
    n = T.d_in - 1
    A, dist = calg.polar_unitary(fr.M[1 : n + 1, 1 : n + 1]) if n else (np.eye(0), 0.0)
    if dist > block_tol:
        raise NotBallAut(f"middle block is not unitary (distance {dist:.3e})")
    V = fr.M.copy()
    V[1 : n + 1] = A.conj().T @ V[1 : n + 1]
    a = V[1 : n + 1, 0].copy()
    lam = fr.lam
    diag = {
        "block_projection_distance": dist,
        "form_constant": fr.form_constant,
        "lambda_real_part": float(lam.real),
        "det_V": complex(np.linalg.det(V)),
        "lambda_times_last_minus_a0": complex(fr.det_product()),
        "relation_residual": float(fr.relation_residual()),
        "b_residual": float(np.max(np.abs(V[0, 1 : n + 1] - lam * np.conj(a)), initial=0.0)),
        "c_residual": float(np.max(np.abs(V[n + 1, 1 : n + 1] - lam * np.conj(a)), initial=0.0)),
        "kappa": complex(fr.kappa),
    }
    return CanonicalParams(A, complex(V[0, 0]), a, complex(lam), diag)


def from_canonical(p):
    """Matrix of the normal form with first column (a0, a, 1/lam + a0), times the A block."""
    lam = complex(p.lam)
    if lam == 0:
        raise ValueError("lam must be nonzero")
    a = np.asarray(p.a, dtype=complex)
    n = a.size
    a0 = complex(p.a0)
    V = np.zeros((n + 2, n + 2), dtype=complex)
    V[0, 0] = a0
    V[0, 1 : n + 1] = lam * np.conj(a)
    V[0, n + 1] = lam - a0
    V[1 : n + 1, 0] = a
    V[1 : n + 1, 1 : n + 1] = np.eye(n)
    V[1 : n + 1, n + 1] = -a
    V[n + 1, 0] = 1 / lam + a0
    V[n + 1, 1 : n + 1] = lam * np.conj(a)
    V[n + 1, n + 1] = lam - 1 / lam - a0
    outer = np.eye(n + 2, dtype=complex)
    outer[1 : n + 1, 1 : n + 1] = np.asarray(p.A, dtype=complex).reshape(n, n)
    return ProjectiveAut(outer @ V)


def dlt_system(xs, ys):
    """Stacked linear constraints ``y_i (T X)_0 - (T X)_i = 0`` on the entries of T."""
    xs = np.atleast_2d(np.asarray(xs, dtype=complex))
    ys = np.atleast_2d(np.asarray(ys, dtype=complex))
    if xs.shape[0] != ys.shape[0]:
        raise DimensionMismatch("need the same number of source and target points")
    S, di = xs.shape
    do = ys.shape[1]
    X = np.concatenate([np.ones((S, 1), dtype=complex), xs], axis=1)
    A = np.zeros((S, do, do + 1, di + 1), dtype=complex)
    A[:, :, 0, :] = ys[:, :, None] * X[:, None, :]
    idx = np.arange(do)
    A[:, idx, idx + 1, :] = -X[:, None, :]
    return A.reshape(S * do, (do + 1) * (di + 1))


def fit_projective(xs, ys, d=None, d_out=None, gap_tol=calg.GAP_TOL,
                   unitarity_tol=BALL_AUT_TOL, min_pairs=None):
    """Least-squares projective map with ``T [1, x] ~ [1, y]`` for every pair.

    ``xs`` and ``ys`` are sphere points of dimension ``d`` and ``d_out``
    (``d_out`` defaults to ``d``). The fit is the smallest right singular
    vector of the stacked constraints; the result is checked to preserve the
    indefinite form up to scale within ``unitarity_tol``.
    """
    xs = np.atleast_2d(np.asarray(xs, dtype=complex))
    ys = np.atleast_2d(np.asarray(ys, dtype=complex))
    d = xs.shape[1] if d is None else d
    d_out = d if d_out is None else d_out
    if xs.shape[1] != d or ys.shape[1] != d_out:
        raise DimensionMismatch(f"expected points of dimension {d} -> {d_out}")
    need = 3 * (max(d, d_out) + 1) ** 2 if min_pairs is None else min_pairs
    if xs.shape[0] < need:
        raise AmbiguousFit(f"need at least {need} pairs, got {xs.shape[0]}")
    A = dlt_system(xs, ys)
    sol = calg.min_right_singular(A, gap_tol)
    T = ProjectiveAut(sol.reshape(d_out + 1, d + 1))
    try:
        resid = float(np.max(np.abs(act(T, xs) - ys)))
    except InvalidTransform as exc:
        raise NotBallAut(str(exc)) from exc
    T = replace(T, fit_residual=resid)
    hres = T.h_residual()
    if not hres < unitarity_tol:
        raise NotBallAut(f"fitted matrix is not a ball map (form residual {hres:.3e})")
    return T


def sphere_points(seed, count, d):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((count, d)) + 1j * rng.standard_normal((count, d))
    return g / np.linalg.norm(g, axis=1, keepdims=True)
