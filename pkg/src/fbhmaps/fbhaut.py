"""Holomorphic automorphisms of the Fock-Bargmann-Hartogs domain.

The group is generated by unitary rotations of ``z``, unitary rotations of
``w`` and the twisted translations

    (z, w) -> (z + v, exp(-mu <z, v> - mu/2 ||v||^2) w).

Every element is stored in the normal form ``rotate_z o rotate_w o translate``
so that

    apply(g, (z, w)) = (U (z + v), W exp(-mu <z, v> - mu/2 ||v||^2) w).

Composing two normal forms only produces an extra unit-modulus scalar in
front of ``W``: writing ``u = U_h^H v_g``,

    g o h = (U_g U_h, exp(-i mu Im <v_h, u>) W_g W_h, v_h + u).
"""

from dataclasses import dataclass

import numpy as np

from . import calg
from .domain import DomainPoint, classify, Region, BOUNDARY_TOL
from .errors import DimensionMismatch, NotOnBoundary


@dataclass(frozen=True)
class FbhAut:
    U: np.ndarray
    W: np.ndarray
    v: np.ndarray
    mu: float = 1.0

    def __post_init__(self):
        U = calg.as_cmatrix(self.U)
        W = calg.as_cmatrix(self.W)
        v = calg.as_cvector(self.v)
        if U.shape != (v.size, v.size) or W.shape[0] != W.shape[1]:
            raise DimensionMismatch(f"inconsistent shapes U{U.shape}, W{W.shape}, v{v.shape}")
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "mu", float(self.mu))

    @property
    def n(self):
        return self.v.size

    @property
    def m(self):
        return self.W.shape[0]

    def invariant_residual(self):
        return max(calg.unitarity_residual(self.U), calg.unitarity_residual(self.W))

    def check(self, tol=calg.ALG_TOL):
        res = self.invariant_residual()
        if res > tol:
            raise ValueError(f"U or W not unitary (residual {res:.3e})")
        return self

    def __call__(self, p):
        return apply(self, p)

    def field_distance(self, other):
        return max(
            float(np.max(np.abs(self.U - other.U))),
            float(np.max(np.abs(self.W - other.W))),
            float(np.max(np.abs(self.v - other.v), initial=0.0)),
        )


def identity(n, m=1, mu=1.0):
    return FbhAut(np.eye(n), np.eye(m), np.zeros(n), mu)


def rotation(U, m=1, mu=1.0):
    U = calg.as_cmatrix(U)
    return FbhAut(U, np.eye(m), np.zeros(U.shape[0]), mu)


def w_rotation(W, n, mu=1.0):
    return FbhAut(np.eye(n), calg.as_cmatrix(W), np.zeros(n), mu)


def translation(v, m=1, mu=1.0):
    v = calg.as_cvector(v)
    return FbhAut(np.eye(v.size), np.eye(m), v, mu)


def _same_group(g, h):
    if g.n != h.n or g.m != h.m or g.mu != h.mu:
        raise DimensionMismatch(
            f"automorphisms of different domains: (n, m, mu) = ({g.n}, {g.m}, {g.mu}) "
            f"vs ({h.n}, {h.m}, {h.mu})"
        )


def _check_point(g, p):
    if p.z.shape[-1] != g.n or p.w.shape[-1] != g.m:
        raise DimensionMismatch(
            f"point has (n, m) = ({p.z.shape[-1]}, {p.w.shape[-1]}), automorphism acts on ({g.n}, {g.m})"
        )


def apply(g, p):
    _check_point(g, p)
    mu = g.mu
    factor = np.exp(-mu * calg.hdot(p.z, g.v) - 0.5 * mu * np.vdot(g.v, g.v).real)
    z = (p.z + g.v) @ g.U.T
    w = (factor[..., None] * p.w) @ g.W.T
    return DomainPoint(z, w)


def compose(g, h):
    """The automorphism ``g o h`` (apply ``h`` first)."""
    _same_group(g, h)
    u = h.U.conj().T @ g.v
    phase = np.exp(-1j * g.mu * np.imag(np.vdot(u, h.v)))
    return FbhAut(g.U @ h.U, phase * (g.W @ h.W), h.v + u, g.mu)


def inverse(g):
    return FbhAut(g.U.conj().T, g.W.conj().T, -(g.U @ g.v), g.mu)


def to_base(params, q, tol=BOUNDARY_TOL):
    """Automorphism sending the boundary point ``q`` to P = (0, ..., 0, 1).

    Translate ``z_q`` to the origin, then undo the phase of the transported
    ``w`` coordinate. Only the ``m = 1`` case is supported.
    """
    if params.m != 1:
        raise DimensionMismatch("to_base is only defined for m = 1")
    q.check(params)
    if classify(params, q, tol) != Region.BOUNDARY:
        raise NotOnBoundary(f"point is not on the boundary (tol {tol:g})")
    t = translation(-q.z, 1, params.mu)
    w1 = apply(t, q).w[0]
    return compose(w_rotation([[np.conj(w1) / abs(w1)]], params.n, params.mu), t)


def random_unitary(rng, k):
    g = (rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))) / np.sqrt(2)
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_aut(params, seed, v_scale=1.0):
    rng = np.random.default_rng(seed)
    U = random_unitary(rng, params.n)
    W = random_unitary(rng, params.m)
    v = v_scale * (rng.standard_normal(params.n) + 1j * rng.standard_normal(params.n)) / np.sqrt(2)
    return FbhAut(U, W, v, params.mu)
