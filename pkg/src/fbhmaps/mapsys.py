"""Holomorphic map descriptors with exact evaluation and analytic Jacobians.

A descriptor is a chain of primitive stages applied left to right:

* ``AutStage``  an automorphism of D_{n,m}(mu)
* ``Power``     (z, w) -> (sqrt(k) z, w^k)
* ``Embed``     (z, w) -> (sqrt(k) z, 0, w^k) into D_{N,1}(mu)
* ``Constant``  a constant map, and ``WScale`` (z, w) -> (z, c w); both only
  exist to build negative controls.
"""

from dataclasses import dataclass

import numpy as np

from . import fbhaut, jsonio
from .domain import DomainParams, DomainPoint
from .errors import DimensionMismatch, SchemaError
from .fbhaut import FbhAut


@dataclass(frozen=True)
class AutStage:
    g: FbhAut
    type = "aut"

    def out_dims(self, n, m):
        if (n, m) != (self.g.n, self.g.m):
            raise DimensionMismatch(f"automorphism acts on ({self.g.n}, {self.g.m}), input is ({n}, {m})")
        return n, m

    def evaluate(self, z, w):
        p = fbhaut.apply(self.g, DomainPoint(z, w))
        return p.z, p.w

    def jacobian(self, z, w):
        g = self.g
        mu = g.mu
        E = np.exp(-mu * np.sum(z * np.conj(g.v), axis=-1) - 0.5 * mu * np.vdot(g.v, g.v).real)
        n, m = g.n, g.m
        J = np.zeros(z.shape[:-1] + (n + m, n + m), dtype=complex)
        J[..., :n, :n] = g.U
        Ww = w @ g.W.T
        J[..., n:, :n] = (-mu * E)[..., None, None] * Ww[..., :, None] * np.conj(g.v)[None, :]
        J[..., n:, n:] = E[..., None, None] * g.W
        return J


@dataclass(frozen=True)
class Power:
    k: int
    type = "power"

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k}")

    def out_dims(self, n, m):
        if m != 1:
            raise DimensionMismatch("power stage needs m = 1")
        return n, 1

    def evaluate(self, z, w):
        return np.sqrt(self.k) * z, w**self.k

    def jacobian(self, z, w):
        n = z.shape[-1]
        J = np.zeros(z.shape[:-1] + (n + 1, n + 1), dtype=complex)
        J[..., :n, :n] = np.sqrt(self.k) * np.eye(n)
        J[..., n, n] = self.k * w[..., 0] ** (self.k - 1)
        return J


@dataclass(frozen=True)
class Embed:
    k: int
    N: int
    type = "embed"

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k}")

    def out_dims(self, n, m):
        if m != 1:
            raise DimensionMismatch("embed stage needs m = 1")
        if self.N < n:
            raise DimensionMismatch(f"embed target N = {self.N} is smaller than n = {n}")
        return self.N, 1

    def evaluate(self, z, w):
        pad = np.zeros(z.shape[:-1] + (self.N - z.shape[-1],), dtype=complex)
        return np.concatenate([np.sqrt(self.k) * z, pad], axis=-1), w**self.k

    def jacobian(self, z, w):
        n = z.shape[-1]
        J = np.zeros(z.shape[:-1] + (self.N + 1, n + 1), dtype=complex)
        J[..., :n, :n] = np.sqrt(self.k) * np.eye(n)
        J[..., self.N, n] = self.k * w[..., 0] ** (self.k - 1)
        return J


@dataclass(frozen=True)
class Constant:
    value: DomainPoint
    type = "constant"

    def out_dims(self, n, m):
        return self.value.z.shape[-1], self.value.w.shape[-1]

    def evaluate(self, z, w):
        shape = z.shape[:-1]
        return (np.broadcast_to(self.value.z, shape + self.value.z.shape).copy(),
                np.broadcast_to(self.value.w, shape + self.value.w.shape).copy())

    def jacobian(self, z, w):
        no, mo = self.out_dims(0, 0)
        return np.zeros(z.shape[:-1] + (no + mo, z.shape[-1] + w.shape[-1]), dtype=complex)


@dataclass(frozen=True)
class WScale:
    c: complex
    type = "wscale"

    def out_dims(self, n, m):
        return n, m

    def evaluate(self, z, w):
        return z.copy(), self.c * w

    def jacobian(self, z, w):
        n, m = z.shape[-1], w.shape[-1]
        d = np.r_[np.ones(n), np.full(m, self.c)].astype(complex)
        return np.broadcast_to(np.diag(d), z.shape[:-1] + (n + m, n + m)).copy()


@dataclass(frozen=True)
class MapDescriptor:
    in_params: DomainParams
    out_params: DomainParams
    stages: tuple

    def __post_init__(self):
        object.__setattr__(self, "stages", tuple(self.stages))
        if self.in_params.mu != self.out_params.mu:
            raise DimensionMismatch("source and target must share mu")
        n, m = self.in_params.n, self.in_params.m
        for i, st in enumerate(self.stages):
            if isinstance(st, AutStage) and st.g.mu != self.in_params.mu:
                raise DimensionMismatch(f"stage {i}: automorphism built for mu = {st.g.mu}")
            try:
                n, m = st.out_dims(n, m)
            except DimensionMismatch as exc:
                raise DimensionMismatch(f"stage {i} ({st.type}): {exc}") from None
        if (n, m) != (self.out_params.n, self.out_params.m):
            raise DimensionMismatch(
                f"chain ends in ({n}, {m}), target domain is ({self.out_params.n}, {self.out_params.m})"
            )

    def _check(self, p):
        p.check(self.in_params)

    def evaluate(self, p):
        self._check(p)
        z, w = p.z, p.w
        for st in self.stages:
            z, w = st.evaluate(z, w)
        return DomainPoint(z, w)

    def __call__(self, p):
        return self.evaluate(p)

    def jacobian(self, p):
        """Holomorphic Jacobian d(z', w')/d(z, w), batched over leading axes."""
        self._check(p)
        z, w = p.z, p.w
        size = self.in_params.n + self.in_params.m
        J = np.broadcast_to(np.eye(size, dtype=complex), z.shape[:-1] + (size, size)).copy()
        for st in self.stages:
            J = st.jacobian(z, w) @ J
            z, w = st.evaluate(z, w)
        return J

    def then(self, *stages, out_params=None):
        """Append stages (the result applies them after this map)."""
        return MapDescriptor(self.in_params, out_params or self.out_params, self.stages + stages)


def identity_map(params):
    return MapDescriptor(params, params, ())


def power_map(params, k):
    return MapDescriptor(params, params, (Power(k),))


def embed_map(params, k, N):
    return MapDescriptor(params, DomainParams(N, 1, params.mu), (Embed(k, N),))


def classified_fixture(params, k, seed, N=None, v_scale=1.0):
    """``Aut o Power(k) o Aut`` (or ``Aut o Embed(k, N) o Aut``) with random automorphisms."""
    rng = np.random.default_rng(seed)
    g2 = fbhaut.random_aut(params, rng.integers(2**63), v_scale)
    if N is None:
        out = params
        core = Power(k)
    else:
        out = DomainParams(N, 1, params.mu)
        core = Embed(k, N)
    g1 = fbhaut.random_aut(out, rng.integers(2**63), v_scale)
    return MapDescriptor(params, out, (AutStage(g2), core, AutStage(g1)))


def fd_jacobian(f, p, n_in, h=1e-5):
    """Central-difference holomorphic Jacobian of a map ``f`` at a single point.

    Uses ``(f(x + h e_j) - f(x - h e_j)) / 2h`` along real directions, which
    is the complex derivative for holomorphic ``f``.
    """
    x = np.concatenate([p.z, p.w])
    cols = []
    for j in range(x.size):
        e = np.zeros(x.size, dtype=complex)
        e[j] = h
        fp = f(DomainPoint((x + e)[:n_in], (x + e)[n_in:]))
        fm = f(DomainPoint((x - e)[:n_in], (x - e)[n_in:]))
        cols.append((np.concatenate([fp.z, fp.w]) - np.concatenate([fm.z, fm.w])) / (2 * h))
    return np.stack(cols, axis=-1)


# ---- JSON ----------------------------------------------------------------

MAP_SCHEMA = {
    "type": "object",
    "properties": {
        "in": jsonio.PARAMS,
        "out": jsonio.PARAMS,
        "stages": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {"type": {"type": "string"}},
                "required": ["type"],
            },
        },
    },
    "required": ["in", "out", "stages"],
}

STAGE_SCHEMAS = {
    "aut": jsonio.AUT,
    "power": {"type": "object", "properties": {"k": {"type": "integer", "minimum": 1}}, "required": ["k"]},
    "embed": {
        "type": "object",
        "properties": {"k": {"type": "integer", "minimum": 1}, "N": {"type": "integer", "minimum": 1}},
        "required": ["k", "N"],
    },
    "constant": jsonio.POINT,
    "wscale": {"type": "object", "properties": {"c": jsonio.COMPLEX}, "required": ["c"]},
}


def parse(obj):
    jsonio.validate(obj, MAP_SCHEMA, "map")
    pin = jsonio.dec_params(obj["in"])
    pout = jsonio.dec_params(obj["out"])
    stages = []
    for i, s in enumerate(obj["stages"]):
        where = f"map.stages[{i}]"
        kind = s["type"]
        if kind not in STAGE_SCHEMAS:
            raise SchemaError(f"{where}: unknown stage type {kind!r}")
        jsonio.validate(s, STAGE_SCHEMAS[kind], where)
        if kind == "aut":
            stages.append(AutStage(jsonio.dec_aut(s, pin.mu, where)))
        elif kind == "power":
            stages.append(Power(s["k"]))
        elif kind == "embed":
            stages.append(Embed(s["k"], s["N"]))
        elif kind == "constant":
            stages.append(Constant(jsonio.dec_point(s)))
        else:
            stages.append(WScale(jsonio.dec_complex(s["c"])))
    try:
        return MapDescriptor(pin, pout, stages)
    except DimensionMismatch as exc:
        raise SchemaError(f"map: {exc}") from None


def serialize(d):
    stages = []
    for st in d.stages:
        if isinstance(st, AutStage):
            s = {"type": "aut", **jsonio.enc_aut(st.g)}
        elif isinstance(st, Power):
            s = {"type": "power", "k": int(st.k)}
        elif isinstance(st, Embed):
            s = {"type": "embed", "k": int(st.k), "N": int(st.N)}
        elif isinstance(st, Constant):
            s = {"type": "constant", **jsonio.enc_point(st.value)}
        else:
            s = {"type": "wscale", "c": jsonio.enc_complex(st.c)}
        stages.append(s)
    return {"in": jsonio.enc_params(d.in_params), "out": jsonio.enc_params(d.out_params), "stages": stages}
