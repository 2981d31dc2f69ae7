"""Recover the canonical form of proper maps between D_{n,1}(mu) domains.

Every proper self-map of D_{n,1}(mu) is ``(sqrt(k) z, w^k)`` up to
automorphisms on both sides, and for n <= N < 2n every proper map
D_{n,1} -> D_{N,1} is ``(sqrt(k) z, 0, w^k)``. Two independent routes find
``k`` here:

* the direct route moves F(P) back to P, reads ``k`` and a unitary off the
  z-block of the Jacobian and validates the result on a point grid;
* the ball-fit route conjugates the map near P into the unit ball, fits the
  projective transformation it becomes there and reads ``k = -1/lam^2`` from
  its eigenvalue at Q.

``fiber_count`` is a third, purely combinatorial oracle on descriptors.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import ballgeo, calg, fbhaut, transfer
from .domain import (BOUNDARY_TOL, DomainParams, DomainPoint, Region, classify, fbh_defining,
                     sample_boundary, sample_interior)
from .errors import (ConstraintResidualLarge, FBHError, FitFailed, HypothesisViolated,
                     NonGenericTarget, NotClassifiedForm, NotProper)
from .mapsys import AutStage, Embed, MapDescriptor, Power, WScale, fd_jacobian

PROPER_TOL = 1e-7
K_GATE = 1e-6
K_GATE_BLACKBOX = 1e-3
RESIDUAL_GATE = 1e-8
CONSTRAINT_GATE = 1e-5


class BlackBoxMap:
    """A map known only through evaluation; Jacobians come from central differences."""

    def __init__(self, f, in_params, out_params, h=1e-5):
        self.f = f
        self.in_params = in_params
        self.out_params = out_params
        self.h = h

    def evaluate(self, p):
        return self.f(p)

    def __call__(self, p):
        return self.f(p)

    def jacobian(self, p):
        return fd_jacobian(self.f, p, self.in_params.n, self.h)


class _Composite:
    """``g o F`` for an automorphism ``g`` of the target."""

    def __init__(self, F, g):
        self.F = F
        self.g = g
        self.in_params = F.in_params
        self.out_params = F.out_params

    def evaluate(self, p):
        return fbhaut.apply(self.g, self.F.evaluate(p))

    __call__ = evaluate

    def jacobian(self, p):
        if isinstance(self.F, MapDescriptor):
            return self.F.then(AutStage(self.g)).jacobian(p)
        return fd_jacobian(self.evaluate, p, self.in_params.n, getattr(self.F, "h", 1e-5))


def _is_blackbox(F):
    return not isinstance(F, MapDescriptor)


def evaluate_chunked(F, p, jobs=1):
    """Evaluate ``F`` on a batch, optionally split over threads; the result does not depend on ``jobs``."""
    if jobs <= 1 or len(p) < 2 * jobs:
        return F.evaluate(p)
    chunks = np.array_split(np.arange(len(p)), jobs)
    with ThreadPoolExecutor(jobs) as ex:
        parts = list(ex.map(lambda idx: F.evaluate(p[idx]), chunks))
    return DomainPoint(np.concatenate([q.z for q in parts]), np.concatenate([q.w for q in parts]))


def _evaluate_reporting(F, p, jobs=1):
    try:
        return evaluate_chunked(F, p, jobs)
    except FBHError:
        raise
    except Exception:
        for i in range(len(p)):
            try:
                F.evaluate(p[i : i + 1])
            except Exception as exc:
                raise RuntimeError(
                    f"map evaluation failed at z={p.z[i].tolist()}, w={p.w[i].tolist()}: {exc}"
                ) from exc
        raise


@dataclass(frozen=True)
class PropernessReport:
    max_boundary_residual: float
    interior_violations: int
    samples_used: int
    passed: bool

    def as_dict(self):
        return {
            "max_boundary_residual": self.max_boundary_residual,
            "interior_violations": self.interior_violations,
            "samples_used": self.samples_used,
            "passed": self.passed,
        }


def verify_proper(F, in_params, out_params, seed=0, count=200, tol=PROPER_TOL, jobs=1):
    """Sampled necessary condition for properness.

    Boundary samples must land on the target boundary (within ``tol``) and
    interior samples must not leave the closed target domain.
    """
    rng = np.random.default_rng(seed)
    bd = sample_boundary(in_params, rng.integers(2**63), count)
    inner = sample_interior(in_params, rng.integers(2**63), count)
    fb = _evaluate_reporting(F, bd, jobs).check(out_params)
    fi = _evaluate_reporting(F, inner, jobs).check(out_params)
    res = float(np.max(np.abs(fbh_defining(out_params, fb))))
    viol = int(np.sum(fbh_defining(out_params, fi) > BOUNDARY_TOL))
    return PropernessReport(res, viol, 2 * count, bool(res < tol and viol == 0))


@dataclass(frozen=True)
class NormalizationResult:
    k: int
    sigma: fbhaut.FbhAut
    tau: fbhaut.FbhAut
    residual_sup: float
    strategy: str = "Direct"
    diagnostics: dict = field(default_factory=dict, compare=False)


def canonical_map(in_params, out_params, k):
    if out_params.n == in_params.n:
        return MapDescriptor(in_params, out_params, (Power(k),))
    return MapDescriptor(in_params, out_params, (Embed(k, out_params.n),))


def validation_grid(params, seed, interior=500, boundary=200):
    rng = np.random.default_rng(seed)
    a = sample_interior(params, rng.integers(2**63), interior)
    b = sample_boundary(params, rng.integers(2**63), boundary)
    return DomainPoint(np.concatenate([a.z, b.z]), np.concatenate([a.w, b.w]))


def sup_distance(p, q):
    return float(max(np.max(np.abs(p.z - q.z), initial=0.0), np.max(np.abs(p.w - q.w))))


def _move_to_base(F, in_params, out_params):
    P = DomainPoint.base(in_params.n)
    Q0 = F.evaluate(P).check(out_params)
    if classify(out_params, Q0) != Region.BOUNDARY:
        raise NotProper(f"F(P) is not a boundary point (defining value {fbh_defining(out_params, Q0):.3e})")
    tau1 = fbhaut.to_base(out_params, Q0)
    F1 = _Composite(F, tau1)
    back = F1.evaluate(P)
    err = sup_distance(back, DomainPoint.base(out_params.n))
    if err > 1e-9:
        raise NotProper(f"could not move F(P) back to P (error {err:.3e})")
    return tau1, F1


def _normalize(F, in_params, out_params, seed, count, k_gate, residual_gate, jobs):
    rep = verify_proper(F, in_params, out_params, seed, count, jobs=jobs)
    if not rep.passed:
        raise NotProper(
            f"sampled properness check failed: boundary residual {rep.max_boundary_residual:.3e}, "
            f"{rep.interior_violations} interior violations"
        )
    if k_gate is None:
        k_gate = K_GATE_BLACKBOX if _is_blackbox(F) else K_GATE
    n, N = in_params.n, out_params.n
    tau1, F1 = _move_to_base(F, in_params, out_params)

    b = DomainPoint(np.zeros(n), np.array([0.5]))
    B = F1.jacobian(b)[:N, :n]
    G = B.conj().T @ B
    kappa = float(np.trace(G).real / n)
    scalar_dev = float(np.max(np.abs(G - kappa * np.eye(n))))
    if scalar_dev > k_gate * max(kappa, 1.0):
        raise NotClassifiedForm(f"B^H B is not a multiple of the identity (deviation {scalar_dev:.3e})")
    k = int(round(kappa))
    if k < 1 or abs(kappa - k) > k_gate:
        raise NotClassifiedForm(f"B^H B = {kappa:.9g} I is not an integer multiple of the identity")
    iso = B / np.sqrt(k)
    if calg.unitarity_residual(iso) > k_gate:
        raise NotClassifiedForm("B / sqrt(k) is not an isometry")
    u, _, vh = np.linalg.svd(iso, full_matrices=False)
    U = calg.unitary_complete(u @ vh)
    tau = fbhaut.compose(fbhaut.rotation(U.conj().T, 1, in_params.mu), tau1)
    sigma = fbhaut.identity(n, 1, in_params.mu)

    grid = validation_grid(in_params, seed)
    got = fbhaut.apply(tau, _evaluate_reporting(F, fbhaut.apply(sigma, grid), jobs))
    want = canonical_map(in_params, out_params, k).evaluate(grid)
    resid = sup_distance(got, want)
    if not resid < residual_gate:
        raise NotClassifiedForm(f"tau o F o sigma deviates from the canonical map by {resid:.3e}")
    diag = {"kappa": kappa, "scalar_deviation": scalar_dev, "properness": rep.as_dict(),
            "grid_points": len(grid)}
    return NormalizationResult(k, sigma, tau, resid, "Direct", diag)


def normalize_self(F, params, seed=0, count=200, k_gate=None, residual_gate=RESIDUAL_GATE, jobs=1):
    """Find ``sigma``, ``tau`` and ``k`` with ``tau o F o sigma = (sqrt(k) z, w^k)``.

    ``sigma`` is always the identity: the whole correction is absorbed on the
    target side.
    """
    if params.m != 1:
        raise HypothesisViolated("only D_{n,1}(mu) is classified here")
    return _normalize(F, params, params, seed, count, k_gate, residual_gate, jobs)


def normalize_nonequidim(F, n, N, params, seed=0, count=200, k_gate=None,
                         residual_gate=RESIDUAL_GATE, jobs=1):
    """As ``normalize_self`` for maps D_{n,1}(mu) -> D_{N,1}(mu); requires n <= N < 2n."""
    if N >= 2 * n:
        raise HypothesisViolated(f"N = {N} is not below 2n = {2 * n}")
    if N < n:
        raise HypothesisViolated(f"N = {N} is smaller than n = {n}")
    pin = DomainParams(n, 1, params.mu)
    pout = DomainParams(N, 1, params.mu)
    return _normalize(F, pin, pout, seed, count, k_gate, residual_gate, jobs)


@dataclass(frozen=True)
class BallFitResult:
    k: int
    kappa: complex
    lam: complex
    a0: complex
    a_vec: np.ndarray
    diagnostics: dict = field(default_factory=dict, compare=False)


def _probe_degree(F1, n):
    """Rough growth of arg w under F1 near P; only used to size the sampling window."""
    theta = 1e-3
    p = DomainPoint(np.zeros(n), np.array([np.exp(1j * theta)]))
    return abs(np.angle(F1.evaluate(p).w[0])) / theta


def ball_pairs(F1, in_params, out_params, seed, count, theta_max=None):
    """Sphere pairs ``(to_ball(p), to_ball(F1(p)))`` for boundary points near P."""
    rng = np.random.default_rng(seed)
    if theta_max is None:
        theta_max = min(1.0, 0.8 * np.pi / max(_probe_degree(F1, in_params.n), 1.0))
    bd = sample_boundary(in_params, rng.integers(2**63), count)
    theta = rng.uniform(-theta_max, theta_max, count)
    w = np.abs(bd.w) * np.exp(1j * theta)[:, None]
    p = DomainPoint(bd.z, w)
    xs = transfer.to_ball(p, in_params.mu).coords
    ys = transfer.to_ball(F1.evaluate(p), out_params.mu).coords
    return xs, ys


def normalize_ballfit(F, params, out_params=None, seed=0, pairs=None,
                      k_gate=K_GATE, constraint_gate=CONSTRAINT_GATE):
    """Degree from the projective map that F becomes in the unit-ball picture.

    The map is moved so that it fixes P, conjugated through ``to_ball`` and
    fitted on sphere pairs. In the normal form of the fitted automorphism the
    first-column vector ``a`` must vanish, ``2 lam - 4 a0 - 2/lam`` must vanish
    and ``-1/lam^2`` must be a positive integer, which is ``k``.
    """
    out_params = out_params or params
    tau1, F1 = _move_to_base(F, params, out_params)
    d_in, d_out = params.n + 1, out_params.n + 1
    count = pairs or 3 * (max(d_in, d_out) + 1) ** 2
    xs, ys = ball_pairs(F1, params, out_params, seed, count)
    try:
        T = ballgeo.fit_projective(xs, ys, d_in, d_out)
        fr = ballgeo.fixer_frame(T)
    except FBHError as exc:
        raise FitFailed(f"{exc.reason}: {exc}") from exc
    a_vec = fr.column
    if d_in == d_out:
        cp = ballgeo.canonical_form(T)
        a_vec = cp.a
    kappa = complex(fr.kappa)
    diag = {
        "fit_residual": T.fit_residual,
        "form_residual": T.h_residual(),
        "lambda_real_part": fr.lam.real,
        "relation_residual": float(fr.relation_residual()),
        "constraint_residual": float(fr.constraint_residual()),
        "a_norm": float(np.linalg.norm(a_vec)),
        "kappa_imag": kappa.imag,
        "pairs": int(count),
    }
    if diag["a_norm"] > constraint_gate or diag["constraint_residual"] > constraint_gate:
        raise ConstraintResidualLarge(
            f"|a| = {diag['a_norm']:.3e}, |2 lam - 4 a0 - 2/lam| = {diag['constraint_residual']:.3e}"
        )
    k = int(round(kappa.real))
    if k < 1 or abs(kappa - k) > k_gate:
        raise NotClassifiedForm(f"-1/lam^2 = {kappa:.9g} is not a positive integer")
    return BallFitResult(k, kappa, fr.lam, fr.a0, a_vec, diag)


def _kth_roots(w, k):
    r = np.abs(w) ** (1.0 / k)
    return r * np.exp(1j * (np.angle(w) + 2 * np.pi * np.arange(k)) / k)


def fiber_count(F, target, tol=1e-9, branch_tol=0.0):
    """Number of distinct preimages of ``target`` under a classified descriptor.

    Stages are inverted from the last one back: automorphisms exactly,
    power and embed stages by enumerating the k-th roots of ``w``.
    """
    target.check(F.out_params)
    zs = [np.asarray(target.z, dtype=complex)]
    ws = [np.asarray(target.w, dtype=complex)]
    for st in reversed(F.stages):
        nz, nw = [], []
        for z, w in zip(zs, ws):
            if isinstance(st, AutStage):
                q = fbhaut.apply(fbhaut.inverse(st.g), DomainPoint(z, w))
                nz.append(q.z)
                nw.append(q.w)
            elif isinstance(st, (Power, Embed)):
                if abs(w[0]) <= branch_tol:
                    raise NonGenericTarget("w = 0 lies on the branch locus")
                if isinstance(st, Embed):
                    n_src = _embed_source_dim(F, st)
                    zin, tail = z[:n_src], z[n_src:]
                    # off the embedded image: no preimage along this branch
                    if np.linalg.norm(tail) > tol * (1 + np.linalg.norm(z)):
                        continue
                else:
                    zin = z
                for root in _kth_roots(w[0], st.k):
                    nz.append(zin / np.sqrt(st.k))
                    nw.append(np.array([root]))
            elif isinstance(st, WScale):
                nz.append(z)
                nw.append(w / st.c)
            else:
                raise ValueError(f"fiber counting is undefined for {type(st).__name__} stages")
        zs, ws = nz, nw
    distinct = []
    for z, w in zip(zs, ws):
        img = F.evaluate(DomainPoint(z, w))
        scale = 1 + np.linalg.norm(np.r_[target.z, target.w])
        if sup_distance(img, target) > 1e-8 * scale:
            continue
        x = np.r_[z, w]
        if all(np.max(np.abs(x - y)) > 1e-8 * (1 + np.max(np.abs(x))) for y in distinct):
            distinct.append(x)
    return len(distinct)


def _embed_source_dim(F, stage):
    n = F.in_params.n
    for st in F.stages:
        if st is stage:
            return n
        n = st.out_dims(n, 1)[0]
    raise ValueError("stage not part of descriptor")
