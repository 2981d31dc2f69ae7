import numpy as np
import pytest

from fbhmaps import fbhaut, normalizer
from fbhmaps.domain import DomainParams, DomainPoint, fbh_defining, sample_boundary
from fbhmaps.errors import (ConstraintResidualLarge, FitFailed, HypothesisViolated, NonGenericTarget,
                            NotClassifiedForm, NotProper)
from fbhmaps.mapsys import (AutStage, Constant, MapDescriptor, WScale, classified_fixture,
                            identity_map, power_map)
from fbhmaps.normalizer import (BlackBoxMap, canonical_map, fiber_count, normalize_ballfit,
                                normalize_nonequidim, normalize_self, verify_proper)


def constant_map(params):
    c = DomainPoint(np.zeros(params.n), np.array([0.5]))
    return MapDescriptor(params, params, (Constant(c),))


def check_normal_form(F, r, seed=7):
    grid = normalizer.validation_grid(F.in_params, seed, 100, 100)
    got = fbhaut.apply(r.tau, F(fbhaut.apply(r.sigma, grid)))
    want = canonical_map(F.in_params, F.out_params, r.k)(grid)
    return normalizer.sup_distance(got, want)


def test_verify_proper_power():
    rep = verify_proper(power_map(DomainParams(1), 2), DomainParams(1), DomainParams(1))
    assert rep.passed and rep.max_boundary_residual < 1e-12 and rep.samples_used == 400


def test_verify_proper_identity():
    params = DomainParams(3, 2, 0.5)
    assert verify_proper(identity_map(params), params, params).passed


def test_verify_proper_rejects_constant():
    params = DomainParams(2)
    rep = verify_proper(constant_map(params), params, params)
    assert not rep.passed and rep.max_boundary_residual > 0.1


def test_verify_proper_rejects_contraction():
    params = DomainParams(2)
    rep = verify_proper(power_map(params, 2).then(WScale(0.9)), params, params)
    assert not rep.passed


def test_verify_proper_is_job_independent():
    F = classified_fixture(DomainParams(3), 2, 1)
    a = verify_proper(F, F.in_params, F.out_params, seed=3, jobs=1)
    b = verify_proper(F, F.in_params, F.out_params, seed=3, jobs=4)
    assert a == b


def test_evaluation_failure_reports_sample():
    def bad(p):
        if np.any(np.abs(p.z) > 1.5):
            raise ArithmeticError("boom")
        return p

    params = DomainParams(2)
    F = BlackBoxMap(bad, params, params)
    with pytest.raises(RuntimeError, match="z="):
        verify_proper(F, params, params)


@pytest.mark.parametrize("n,k", [(1, 1), (1, 2), (2, 3), (5, 6)])
def test_normalize_self_fixture(n, k):
    params = DomainParams(n, 1, [0.5, 1.0, 2.0][k % 3])
    F = classified_fixture(params, k, 10 * n + k)
    r = normalize_self(F, params)
    assert r.k == k and r.residual_sup < 1e-8 and r.strategy == "Direct"
    assert check_normal_form(F, r) < 1e-8


def test_normalize_power_example():
    params = DomainParams(1)
    r = normalize_self(power_map(params, 2), params)
    assert r.k == 2
    assert r.tau.field_distance(fbhaut.identity(1)) < 1e-12


def test_normalize_identity():
    params = DomainParams(3)
    assert normalize_self(identity_map(params), params).k == 1


def test_normalize_is_idempotent():
    params = DomainParams(3, 1, 2.0)
    F = classified_fixture(params, 4, 2)
    r = normalize_self(F, params)
    G = F.then(AutStage(r.tau))
    r2 = normalize_self(G, params)
    assert r2.k == 4
    assert r2.tau.field_distance(fbhaut.identity(3, 1, 2.0)) < 1e-8


@pytest.mark.parametrize("n,N,k", [(2, 2, 2), (2, 3, 3), (4, 7, 2), (6, 11, 5)])
def test_normalize_nonequidim(n, N, k):
    params = DomainParams(n)
    F = classified_fixture(params, k, n + N + k, N=N)
    r = normalize_nonequidim(F, n, N, params)
    assert r.k == k and r.residual_sup < 1e-8
    assert check_normal_form(F, r) < 1e-8


@pytest.mark.parametrize("n,N", [(2, 4), (3, 6), (3, 2)])
def test_nonequidim_hypothesis(n, N):
    with pytest.raises(HypothesisViolated):
        normalize_nonequidim(None, n, N, DomainParams(n))


def test_normalize_self_requires_m1():
    params = DomainParams(2, 2)
    with pytest.raises(HypothesisViolated):
        normalize_self(identity_map(params), params)


@pytest.mark.parametrize("make", [constant_map, lambda p: power_map(p, 2).then(WScale(0.9))],
                         ids=["constant", "contraction"])
def test_normalize_negative_controls(make):
    params = DomainParams(2)
    with pytest.raises((NotProper, NotClassifiedForm)):
        normalize_self(make(params), params)
    with pytest.raises((NotProper, NotClassifiedForm, FitFailed)):
        normalize_ballfit(make(params), params)


def test_normalize_rejects_non_classified_proper_looking_map():
    """A boundary-preserving map whose z-part is not a scaled unitary fails the scalar test."""
    params = DomainParams(2)

    def f(p):
        return DomainPoint(p.z * np.array([1.0, np.sqrt(2)]), p.w**2)

    F = BlackBoxMap(f, params, params)
    with pytest.raises((NotProper, NotClassifiedForm)):
        normalize_self(F, params)


@pytest.mark.parametrize("k", [1, 3])
def test_blackbox(k):
    params = DomainParams(3)
    D = classified_fixture(params, k, 5)
    F = BlackBoxMap(D.evaluate, params, params)
    r = normalize_self(F, params)
    assert r.k == k and r.residual_sup < 1e-8


@pytest.mark.parametrize("n,N,k", [(1, 1, 1), (3, 3, 4), (8, 8, 6), (4, 7, 3)])
def test_ballfit_matches_direct(n, N, k):
    params = DomainParams(n)
    F = classified_fixture(params, k, 3 * n + k, N=None if N == n else N)
    b = normalize_ballfit(F, params, F.out_params)
    assert b.k == k
    assert abs(b.kappa.imag) < 1e-7 and abs(b.lam.real) < 1e-7
    assert b.diagnostics["relation_residual"] < 1e-7
    assert b.diagnostics["form_residual"] < 1e-8


def test_ballfit_rejects_non_proper_map_fixing_p():
    params = DomainParams(1)
    F = BlackBoxMap(lambda p: DomainPoint(0.5 * p.z, p.w), params, params)
    with pytest.raises((FitFailed, ConstraintResidualLarge, NotClassifiedForm)):
        normalize_ballfit(F, params)


def test_branch_locus_determinant():
    F = power_map(DomainParams(1), 2)
    z = np.linspace(-0.5, 0.5, 11)[:, None].astype(complex)
    dets = np.linalg.det(F.jacobian(DomainPoint(z, np.zeros((11, 1)))))
    assert np.max(np.abs(dets)) < 1e-9


@pytest.mark.parametrize("n,N,k", [(1, 1, 2), (3, 3, 5), (2, 3, 3), (8, 8, 6)])
def test_fiber_count_fixture(n, N, k):
    params = DomainParams(n)
    F = classified_fixture(params, k, n + k, N=None if N == n else N)
    target = F(sample_boundary(params, 4, 1)[0])
    target = DomainPoint(target.z, 0.7 * target.w)
    assert fiber_count(F, target) == k


def test_fiber_count_power_example():
    F = power_map(DomainParams(1), 2)
    assert fiber_count(F, DomainPoint(np.array([0.1]), np.array([0.25]))) == 2
    with pytest.raises(NonGenericTarget):
        fiber_count(F, DomainPoint(np.array([0.1]), np.array([0.0])))


def test_fiber_count_off_image():
    F = normalizer.canonical_map(DomainParams(2), DomainParams(3), 2)
    assert fiber_count(F, DomainPoint(np.array([0.1, 0, 0.1]), np.array([0.3]))) == 0


def test_fiber_count_identity():
    F = identity_map(DomainParams(2))
    assert fiber_count(F, DomainPoint(np.array([0.1, 0.2]), np.array([0.3]))) == 1


def test_boundary_sample_lands_on_boundary():
    F = classified_fixture(DomainParams(2), 3, 9)
    q = F(sample_boundary(F.in_params, 0, 50))
    assert np.max(np.abs(fbh_defining(F.out_params, q))) < 1e-10
