import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fbhmaps import ballgeo, calg
from fbhmaps.ballgeo import (
    ProjectiveAut,
    act,
    base_point,
    canonical_form,
    fit_projective,
    fixer_frame,
    from_canonical,
    psi_alpha,
    sphere_points,
    unitary_block,
)
from fbhmaps.errors import AmbiguousFit, NotBallAut, NotFixingQ
from fbhmaps.fbhaut import random_unitary


def conj_power(k, n):
    """Ball matrix of (z, w) -> (sqrt(k) z, w^k) transported through the charts."""
    M = np.zeros((n + 2, n + 2))
    M[0, 0] = M[n + 1, n + 1] = (k + 1) / 2
    M[0, n + 1] = M[n + 1, 0] = (1 - k) / 2
    M[1 : n + 1, 1 : n + 1] = np.sqrt(k) * np.eye(n)
    return ProjectiveAut(M)


def random_ball_aut(rng, d):
    a = complex(*rng.uniform(-0.6, 0.6, 2))
    return (unitary_block(random_unitary(rng, d)) @ psi_alpha(a, d)
            @ unitary_block(random_unitary(rng, d)))


def generic_fixer(rng, d):
    """A random automorphism followed by a unitary that brings the image of Q back to Q."""
    T = random_ball_aut(rng, d)
    y = act(T, base_point(d))
    C = calg.unitary_complete(y[:, None] / np.linalg.norm(y))
    R = np.roll(C.conj().T, -1, axis=0)
    return unitary_block(R) @ T


def same_action(S, T, pts):
    return float(np.max(np.abs(act(S, pts) - act(T, pts))))


def test_psi_alpha_matrix_and_action():
    psi = psi_alpha(0.6, 2)
    assert np.allclose(psi.M[:2, :2], [[1.25, 0.75], [0.75, 1.25]], atol=1e-15)
    assert np.allclose(act(psi, np.zeros(2)), [0.6, 0])
    z = np.array([0.3 - 0.2j, 0.1j])
    want = (z[0] + 0.6) / (1 + 0.6 * z[0])
    assert abs(act(psi, z)[0] - want) < 1e-15


def test_psi_alpha_rejects_outside_disc():
    with pytest.raises(ValueError):
        psi_alpha(1.0, 2)


@pytest.mark.parametrize("d", [1, 2, 5])
def test_sphere_preserved(rng, d):
    T = random_ball_aut(rng, d)
    x = sphere_points(1, 1000, d)
    y = act(T, x)
    assert np.max(np.abs(np.linalg.norm(y, axis=1) - 1)) < 1e-12
    inside = 0.9 * x * rng.uniform(size=(1000, 1))
    assert np.all(np.linalg.norm(act(T, inside), axis=1) < 1)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 5))
def test_group_closure(seed, d):
    rng = np.random.default_rng(seed)
    S, T = random_ball_aut(rng, d), random_ball_aut(rng, d)
    assert (S @ T).h_residual() < 1e-10
    x = 0.8 * sphere_points(seed, 20, d)
    assert np.max(np.abs(act(S @ T, x) - act(S, act(T, x)))) < 1e-10


def test_row_identities(rng):
    for d in (1, 3, 6):
        first, others, off = ballgeo.row_identities(random_ball_aut(rng, d).M)
        assert max(first, others, off) < 1e-12


def test_normalized_is_j_unitary(rng):
    T = ProjectiveAut((2 - 1j) * random_ball_aut(rng, 3).M)
    N = T.normalized()
    assert calg.is_h_unitary(N.M.conj().T, calg.HermitianSignature(1, 3), 1e-12)
    assert same_action(T, N, 0.5 * sphere_points(0, 10, 3)) < 1e-13


def test_not_fixing_q():
    with pytest.raises(NotFixingQ):
        fixer_frame(psi_alpha(0.3, 2))


def test_canonical_identity():
    cp = canonical_form(ballgeo.identity(3))
    assert abs(cp.lam - 1j) < 1e-15 and abs(cp.a0 - 1j) < 1e-15
    assert np.allclose(cp.A, 1j * np.eye(2)) and np.allclose(cp.a, 0)
    assert abs(cp.kappa - 1) < 1e-15
    x = 0.8 * sphere_points(2, 20, 3)
    assert np.max(np.abs(act(from_canonical(cp), x) - x)) < 1e-15


def test_from_canonical_b_row(rng):
    a = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    lam = 1.7j
    M = from_canonical(ballgeo.CanonicalParams(np.eye(3), 0.2 + 0.4j, a, lam)).M
    assert np.array_equal(M[0, 1:4], lam * np.conj(a))
    assert np.array_equal(M[4, 1:4], lam * np.conj(a))
    with pytest.raises(ValueError):
        from_canonical(ballgeo.CanonicalParams(np.eye(3), 0.2, a, 0))


@pytest.mark.parametrize("k,n", [(1, 1), (2, 1), (3, 4), (6, 2)])
def test_canonical_conjugated_power(k, n):
    cp = canonical_form(conj_power(k, n))
    assert abs(cp.kappa - k) < 1e-12
    assert abs(cp.lam.real) < 1e-12 and cp.lam.imag > 0
    assert np.allclose(cp.a, 0)
    assert abs(2 * cp.lam - 4 * cp.a0 - 2 / cp.lam) < 1e-12
    assert abs(cp.diagnostics["lambda_times_last_minus_a0"] - 1) < 1e-12
    # det V carries the opposite sign of lam (a_last - a0).
    assert abs(cp.diagnostics["det_V"] + 1) < 1e-12


def test_canonical_z_rotation(rng):
    U = random_unitary(rng, 3)
    B = np.eye(4, dtype=complex)
    B[:3, :3] = U
    cp = canonical_form(unitary_block(B))
    assert abs(cp.kappa - 1) < 1e-12
    assert np.allclose(cp.a, 0)
    # A is U up to the phase picked for lam.
    assert np.allclose(cp.A, 1j * U)


@pytest.mark.parametrize("seed", range(6))
def test_generic_fixer(seed):
    rng = np.random.default_rng(seed)
    d = 1 + seed % 4
    T = generic_fixer(rng, d)
    assert ballgeo.fixes_q(T)
    fr = fixer_frame(T)
    assert fr.relation_residual() < 1e-10
    assert abs(fr.det_product() - 1) < 1e-10
    assert abs(fr.kappa.imag) < 1e-10 and fr.kappa.real > 0
    assert abs(fr.kappa - 1 / abs(fr.lam) ** 2) < 1e-10
    cp = canonical_form(T)
    if d > 1:
        assert np.linalg.norm(cp.a) > 1e-3
    assert cp.diagnostics["b_residual"] < 1e-10
    assert cp.diagnostics["c_residual"] < 1e-10
    assert cp.diagnostics["block_projection_distance"] < 1e-10
    back = from_canonical(cp)
    assert same_action(T, back, 0.7 * sphere_points(seed, 30, d)) < 1e-10


@pytest.mark.parametrize("seed", range(4))
def test_canonical_roundtrip_params(seed):
    cp = canonical_form(generic_fixer(np.random.default_rng(100 + seed), 4))
    T = from_canonical(cp)
    assert T.h_residual() < 1e-10
    cp2 = canonical_form(T)
    assert abs(cp2.lam - cp.lam) < 1e-10 and abs(cp2.a0 - cp.a0) < 1e-10
    assert np.allclose(cp2.a, cp.a, atol=1e-10) and np.allclose(cp2.A, cp.A, atol=1e-10)


@pytest.mark.parametrize("T", [psi_alpha(0.3, 2), ballgeo.identity(2)], ids=["psi", "identity"])
def test_fit_exact(T):
    x = sphere_points(11, 60, 2)
    F = fit_projective(x, act(T, x))
    assert F.fit_residual < 1e-12
    assert F.h_residual() < 1e-10
    assert same_action(F, T, 0.9 * sphere_points(12, 50, 2)) < 1e-10


def test_fit_noisy(rng):
    T = psi_alpha(0.3, 2)
    x = sphere_points(13, 200, 2)
    y = act(T, x) + 1e-3 * (rng.standard_normal((200, 2)) + 1j * rng.standard_normal((200, 2)))
    with pytest.raises(NotBallAut):
        fit_projective(x, y)
    F = fit_projective(x, y, unitarity_tol=1e-2)
    assert same_action(F, T, 0.5 * sphere_points(14, 50, 2)) < 1e-2


def test_fit_needs_enough_pairs():
    x = sphere_points(0, 10, 2)
    with pytest.raises(AmbiguousFit):
        fit_projective(x, x)


def test_fit_rejects_non_ball_map():
    x = sphere_points(15, 60, 2)
    with pytest.raises(NotBallAut):
        fit_projective(x, 0.5 * x)
