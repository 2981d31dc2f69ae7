"""Fock-Bargmann-Hartogs domains, the Siegel half-space and the unit ball.

``D_{n,m}(mu) = {(z, w) : ||w||^2 < exp(-mu ||z||^2)}``. Points carry ``z`` and
``w`` as complex arrays whose last axis is the coordinate axis, so a single
``DomainPoint`` may also hold a batch of points.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DimensionMismatch

BOUNDARY_TOL = 1e-9


@dataclass(frozen=True)
class DomainParams:
    n: int
    m: int = 1
    mu: float = 1.0

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError(f"dimensions must be positive, got n={self.n}, m={self.m}")
        if not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")


@dataclass(frozen=True)
class DomainPoint:
    z: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.z, dtype=complex)
        w = np.asarray(self.w, dtype=complex)
        if z.ndim == 0 or w.ndim == 0:
            raise DimensionMismatch("z and w must be arrays with a coordinate axis")
        if z.shape[:-1] != w.shape[:-1]:
            raise DimensionMismatch(f"batch shapes differ: {z.shape} vs {w.shape}")
        if not (np.all(np.isfinite(z)) and np.all(np.isfinite(w))):
            raise ValueError("point has non-finite coordinates")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "w", w)

    @property
    def batch_shape(self):
        return self.z.shape[:-1]

    def __len__(self):
        return self.z.shape[0] if self.z.ndim > 1 else 1

    def __getitem__(self, i):
        return DomainPoint(self.z[i], self.w[i])

    def check(self, params):
        if self.z.shape[-1] != params.n or self.w.shape[-1] != params.m:
            raise DimensionMismatch(
                f"point has (n, m) = ({self.z.shape[-1]}, {self.w.shape[-1]}), "
                f"domain expects ({params.n}, {params.m})"
            )
        return self

    @classmethod
    def base(cls, n, m=1):
        """The base boundary point P = (0, ..., 0, 1)."""
        w = np.zeros(m, dtype=complex)
        w[-1] = 1.0
        return cls(np.zeros(n, dtype=complex), w)


class Region(str, Enum):
    INTERIOR = "Interior"
    BOUNDARY = "Boundary"
    EXTERIOR = "Exterior"


def _sq(x):
    return np.sum(np.abs(x) ** 2, axis=-1)


def fbh_defining(params, p):
    p.check(params)
    return _sq(p.w) - np.exp(-params.mu * _sq(p.z))


def classify(params, p, tol=BOUNDARY_TOL):
    r = fbh_defining(params, p)
    if np.ndim(r) == 0:
        if abs(r) < tol:
            return Region.BOUNDARY
        return Region.INTERIOR if r < 0 else Region.EXTERIOR
    out = np.where(np.abs(r) < tol, Region.BOUNDARY.value,
                   np.where(r < 0, Region.INTERIOR.value, Region.EXTERIOR.value))
    return out


def _complex_gaussian(rng, shape, scale=1.0):
    # E|z_j|^2 = scale^2 per coordinate
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def _sphere(rng, count, m):
    g = _complex_gaussian(rng, (count, m))
    return g / np.linalg.norm(g, axis=-1, keepdims=True)


def sample_boundary(params, seed, count, z_scale=1.0):
    """Boundary points with complex-Gaussian ``z`` and ``w`` uniform on its sphere.

    With the default ``z_scale`` the mean of ``||z||^2`` is ``n``.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    z = _complex_gaussian(rng, (count, params.n), z_scale)
    radius = np.exp(-params.mu * _sq(z) / 2)
    w = radius[:, None] * _sphere(rng, count, params.m)
    return DomainPoint(z, w)


def sample_interior(params, seed, count, z_scale=1.0):
    """Interior points: boundary samples with ``w`` shrunk by a factor in [0, 0.98)."""
    rng = np.random.default_rng(seed)
    bd = sample_boundary(params, rng.integers(2**63), count, z_scale)
    t = 0.98 * np.sqrt(rng.uniform(size=count))
    return DomainPoint(bd.z, t[:, None] * bd.w)


def siegel_defining(z, W):
    """Im W - ||z||^2; positive inside the Siegel half-space."""
    return np.imag(W) - _sq(np.asarray(z, dtype=complex))


def ball_defining(x):
    return _sq(np.asarray(x, dtype=complex)) - 1.0
