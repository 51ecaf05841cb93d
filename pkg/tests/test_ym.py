import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ncgeom.connections import partition_representative
from ncgeom.ym import (FloatConnection, antihermitian_part, census, classify_vacuum, curvature, finite_difference_error,
                       flat_residual, flow, gauge_orbit_dim, gradient, hessian, mass_spectrum, potential,
                       potential_loops)


def _rep(p):
    return FloatConnection.from_exact(partition_representative(p)).A


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 4), st.integers(0, 10 ** 6))
def test_potential_matches_loops(K, seed):
    A = FloatConnection.random(K, seed).A
    assert potential(A) == pytest.approx(potential_loops(A), rel=1e-12)
    assert potential(A) >= 0


@settings(max_examples=10, deadline=None)
@given(st.integers(1, 3), st.integers(0, 10 ** 6))
def test_gradient_against_finite_differences(K, seed):
    assert finite_difference_error(FloatConnection.random(K, seed).A) < 1e-6


@settings(max_examples=10, deadline=None)
@given(st.integers(1, 4), st.integers(0, 10 ** 6))
def test_potential_is_gauge_invariant(K, seed):
    rng = np.random.default_rng(seed)
    A = FloatConnection.random(K, seed).A
    X = antihermitian_part(rng.normal(size=(K, K)) + 1j * rng.normal(size=(K, K)))
    w, v = np.linalg.eigh(1j * X)
    U = v @ np.diag(np.exp(-1j * w)) @ v.conj().T
    B = np.array([U @ a @ U.conj().T for a in A])
    assert potential(B) == pytest.approx(potential(A), rel=1e-10)


def test_representatives_are_vacua():
    for p in ((1,), (2,), (1, 1), (3,), (2, 1), (2, 2)):
        A = _rep(p)
        assert potential(A) < 1e-24 and flat_residual(A) < 1e-12
        assert np.linalg.norm(gradient(A)) < 1e-12
        assert classify_vacuum(A) == p


def test_perturbed_representative_classifies():
    rng = np.random.default_rng(0)
    A = _rep((2, 1))
    A = A + 1e-9 * antihermitian_part(rng.normal(size=A.shape) + 1j * rng.normal(size=A.shape))
    assert classify_vacuum(A) == (2, 1)


def test_curved_connection_is_unresolved():
    A = FloatConnection.random(2, 3).A
    assert flat_residual(A) > 1e-3
    assert classify_vacuum(A) == "unresolved"


def test_curvature_is_antisymmetric():
    A = FloatConnection.random(3, 5).A
    F = curvature(A)
    assert np.allclose(F, -np.swapaxes(F, 0, 1))


def test_flow_is_deterministic():
    r1, A1 = flow(2, 11)
    r2, A2 = flow(2, 11)
    assert r1 == r2 and np.array_equal(A1, A2)
    assert census(2, range(3)) == census(2, range(3))


def test_flow_decreases_potential_to_a_vacuum():
    start = FloatConnection.random(2, 1).A
    rep, A = flow(2, 1)
    assert rep.final_potential < potential(start)
    assert rep.converged and rep.flat_residual < 1e-6
    assert rep.class_label in ((2,), (1, 1))


def test_flow_only_for_n2():
    with pytest.raises(ValueError):
        flow(2, 0, n=3)


def test_hessian_k1():
    # K = 1: F_kl = 2 eps_klm A_m, so V = 2 |a|^2 and the Hessian is 4
    assert np.allclose(mass_spectrum(np.zeros((3, 1, 1), dtype=complex)), [4, 4, 4])


def test_hessian_is_symmetric():
    H = hessian(FloatConnection.random(2, 8).A)
    assert np.allclose(H, H.T)


@pytest.mark.parametrize("p", [(2,), (1, 1), (3,), (2, 1), (1, 1, 1)])
def test_mass_spectrum_at_vacua(p):
    A = _rep(p)
    ev = mass_spectrum(A)
    assert ev.min() > -1e-8
    zeros = int(np.sum(np.abs(ev) < 1e-6))
    assert zeros >= gauge_orbit_dim(A)


def test_gauge_orbit_dims():
    # stabilizer of the irreducible 2-dim rep is U(1): orbit dim 4 - 1
    assert gauge_orbit_dim(_rep((2,))) == 3
    assert gauge_orbit_dim(_rep((1, 1))) == 0


def test_mass_spectrum_rejects_non_vacuum():
    with pytest.raises(ValueError, match="not a vacuum"):
        mass_spectrum(FloatConnection.random(2, 0))
