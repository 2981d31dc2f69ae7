"""Biholomorphic charts linking D_{n,1}(mu), the Siegel half-space and the ball.

    log chart:  (z, w)  -> (sqrt(mu) z, -2i Log w)         boundary -> Im W = ||z||^2
    Cayley:     (z, W)  -> (2z / (W+i), -(W-i) / (W+i))    Im W = ||z||^2 -> sphere

The base point P = (0, ..., 0, 1) goes to O = 0 and then to Q = (0, ..., 0, 1).
``Log`` is the principal branch, so the log chart is defined on the plane
slit along the closed negative real axis.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .domain import DomainPoint
from .errors import BranchCut, DimensionMismatch, PoleAtMinusI, PoleAtMinusOne, ZeroW

POLE_TOL = 1e-14


class Stage(str, Enum):
    FBH = "FBH"
    SIEGEL = "Siegel"
    BALL = "Ball"


@dataclass(frozen=True)
class ChartPoint:
    stage: Stage
    coords: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=complex)
        if c.ndim == 0 or c.shape[-1] < 2:
            raise DimensionMismatch("chart coordinates need at least two entries")
        object.__setattr__(self, "stage", Stage(self.stage))
        object.__setattr__(self, "coords", c)

    @property
    def head(self):
        return self.coords[..., :-1]

    @property
    def last(self):
        return self.coords[..., -1]


def _expect(x, stage):
    if x.stage != stage:
        raise ValueError(f"expected a {stage.value} point, got {x.stage.value}")


def _join(head, last):
    return np.concatenate([head, np.asarray(last)[..., None]], axis=-1)


def log_chart(p, mu=1.0):
    if p.w.shape[-1] != 1:
        raise DimensionMismatch("the log chart needs m = 1")
    w = p.w[..., 0]
    if np.any(w == 0):
        raise ZeroW("w = 0 has no logarithm")
    if np.any((w.imag == 0) & (w.real < 0)):
        raise BranchCut("w lies on the negative real axis")
    return ChartPoint(Stage.SIEGEL, _join(np.sqrt(mu) * p.z, -2j * np.log(w)))


def log_chart_inv(q, mu=1.0):
    _expect(q, Stage.SIEGEL)
    return DomainPoint(q.head / np.sqrt(mu), np.exp(0.5j * q.last)[..., None])


def cayley(q):
    _expect(q, Stage.SIEGEL)
    den = q.last + 1j
    if np.any(np.abs(den) < POLE_TOL):
        raise PoleAtMinusI("W = -i is a pole of the Cayley transform")
    return ChartPoint(Stage.BALL, _join(2 * q.head / den[..., None], -(q.last - 1j) / den))


def cayley_inv(x):
    _expect(x, Stage.BALL)
    den = 1 + x.last
    if np.any(np.abs(den) < POLE_TOL):
        raise PoleAtMinusOne("eta = -1 is a pole of the inverse Cayley transform")
    return ChartPoint(Stage.SIEGEL, _join(1j * x.head / den[..., None], 1j * (1 - x.last) / den))


def to_ball(p, mu=1.0):
    return cayley(log_chart(p, mu))


def from_ball(x, mu=1.0):
    return log_chart_inv(cayley_inv(x), mu)


def siegel_point(z, W):
    return ChartPoint(Stage.SIEGEL, _join(np.asarray(z, dtype=complex), W))


def ball_point(x):
    return ChartPoint(Stage.BALL, np.asarray(x, dtype=complex))
