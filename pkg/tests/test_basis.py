import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ebtkit.basis import (
    bloch_vector,
    ebt_diag_necessary,
    gell_mann_basis,
    transfer_matrix,
    wu_factorization,
)
from ebtkit.channels import (
    KrausChannel,
    compose,
    convex_combination,
    dephasing_channel,
    depolarizing_channel,
    identity_channel,
    point_channel,
)
from ebtkit.errors import NonHermiticityPreserving, UnsupportedDimension
from ebtkit.extremality import tetrahedron_channel, trine_block_channel
from ebtkit.linalg import hs_inner, numerical_rank
from ebtkit.states import random_density

from conftest import random_extreme_cq, random_holevo, random_kraus, random_qc, random_states

PAULI = [np.eye(2), np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.diag([1.0, -1.0])]


def test_qubit_basis_is_pauli():
    b = gell_mann_basis(2)
    for g, p in zip(b.elements, PAULI):
        assert np.allclose(g, p / np.sqrt(2))


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_basis_orthonormal_and_traceless(d):
    b = gell_mann_basis(d)
    assert len(b) == d * d
    assert np.allclose(b.elements[0], np.eye(d) / np.sqrt(d))
    for j, gj in enumerate(b.elements):
        assert np.allclose(gj, gj.conj().T)
        if j:
            assert abs(np.trace(gj)) < 1e-12
        for k, gk in enumerate(b.elements):
            assert abs(hs_inner(gj, gk) - (j == k)) < 1e-12


def test_basis_rejects_d1():
    with pytest.raises(UnsupportedDimension):
        gell_mann_basis(1)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_bloch_vector_maximally_mixed(d):
    w = bloch_vector(np.eye(d) / d, gell_mann_basis(d))
    expected = np.zeros(d * d)
    expected[0] = d**-0.5
    assert np.allclose(w, expected)


def test_bloch_vector_qubit_zero():
    w = bloch_vector(np.diag([1.0, 0.0]), gell_mann_basis(2))
    assert np.allclose(w, [1 / np.sqrt(2), 0, 0, 1 / np.sqrt(2)])


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5), st.integers(0, 2**32 - 1))
def test_bloch_reconstruction_and_bound(d, seed):
    b = gell_mann_basis(d)
    rho = random_density(d, seed=seed)
    w = bloch_vector(rho, b)
    assert w[0] == pytest.approx(d**-0.5)
    assert np.linalg.norm(b.matrix(w) - rho.mat) <= 1e-10
    assert np.sum(w[1:] ** 2) <= (d - 1) / d + 1e-10


def test_coordinates_reject_non_hermitian():
    with pytest.raises(NonHermiticityPreserving):
        gell_mann_basis(2).coordinates(np.array([[0, 1], [0, 0]]))


# --- transfer matrix --------------------------------------------------------------

def test_transfer_matrix_identity():
    assert np.allclose(transfer_matrix(identity_channel(3), gell_mann_basis(3)).t, np.eye(9))


@pytest.mark.parametrize("lam", [0.0, 0.25, 0.5, 1.0])
def test_transfer_matrix_depolarizing(lam):
    tm = transfer_matrix(depolarizing_channel(2, lam), gell_mann_basis(2))
    assert np.allclose(tm.t, np.diag([1, lam, lam, lam]), atol=1e-12)


def test_transfer_matrix_point_maximally_mixed():
    tm = transfer_matrix(point_channel(np.eye(2) / 2), gell_mann_basis(2))
    expected = np.zeros((4, 4))
    expected[0, 0] = 1.0
    assert np.allclose(tm.t, expected)


@pytest.mark.parametrize("seed", range(5))
def test_transfer_matrix_acts_on_bloch_vectors(seed):
    d = 2 + seed % 3
    b = gell_mann_basis(d)
    ch = random_kraus(d, d, 3, seed)
    tm = transfer_matrix(ch, b)
    assert tm.first_row_residual() <= 1e-9
    for rho in random_states(d, 5, seed):
        assert np.linalg.norm(bloch_vector(ch(rho), b) - tm.t @ bloch_vector(rho, b)) <= 1e-9


def test_transfer_matrix_rejects_non_hermiticity_preserving():
    a = np.array([[1, 0], [0, 1j]])
    # rho -> A rho A^T is not Hermiticity preserving
    class Odd(KrausChannel):
        def _apply(self, x):
            return a @ x @ a.T

    with pytest.raises(NonHermiticityPreserving):
        transfer_matrix(Odd((a,)), gell_mann_basis(2))


def test_transfer_matrix_composition():
    b = gell_mann_basis(3)
    phi, ups = random_kraus(3, 3, 2, 1), random_holevo(3, 3, 2)
    lhs = transfer_matrix(compose(phi, ups), b).t
    rhs = transfer_matrix(phi, b).t @ transfer_matrix(ups, b).t
    assert np.linalg.norm(lhs - rhs) <= 1e-9


def test_transfer_matrix_convexity():
    b = gell_mann_basis(3)
    p1, p2 = random_holevo(3, 3, 4), random_qc(3, 3, 5)
    mix = transfer_matrix(convex_combination(0.7, p1, p2), b).t
    assert np.linalg.norm(mix - 0.7 * transfer_matrix(p1, b).t - 0.3 * transfer_matrix(p2, b).t) <= 1e-10


@pytest.mark.parametrize("seed", range(6))
def test_rank_bound_cq_qc(seed):
    d = 2 + seed % 2
    b = gell_mann_basis(d)
    assert transfer_matrix(random_extreme_cq(d, seed), b).rank() <= d
    assert transfer_matrix(random_qc(d, d, seed), b).rank() <= d


# --- W/U factors --------------------------------------------------------------------

def test_wu_point_channel():
    r = random_density(2, seed=0).mat
    f = wu_factorization(point_channel(r), gell_mann_basis(2))
    assert f.w.shape == (4, 1) and f.u.shape == (4, 1)
    assert np.allclose(f.w[:, 0], bloch_vector(r, gell_mann_basis(2)))
    assert np.allclose(f.u[:, 0], [np.sqrt(2), 0, 0, 0])


@pytest.mark.parametrize("ch", [tetrahedron_channel(), trine_block_channel(), dephasing_channel(3)], ids=["tet", "trine", "deph"])
def test_wu_product_is_transfer_matrix(ch):
    b = gell_mann_basis(ch.dim_in)
    f = wu_factorization(ch, b)
    assert np.linalg.norm(f.product() - transfer_matrix(ch, b).t) <= 1e-10


def test_wu_cq_rank():
    ch = random_extreme_cq(3, seed=1)
    assert numerical_rank(wu_factorization(ch, gell_mann_basis(3)).product(), 1e-9) <= 3


# --- qubit diagonal condition ----------------------------------------------------------

@pytest.mark.parametrize("lam,expected", [(0.25, True), (0.5, False)])
def test_diag_condition_depolarizing(lam, expected):
    ok, value = ebt_diag_necessary(transfer_matrix(depolarizing_channel(2, lam), gell_mann_basis(2)))
    assert value == pytest.approx(3 * lam, abs=1e-10)
    assert ok is expected


def test_diag_condition_identity():
    ok, value = ebt_diag_necessary(transfer_matrix(identity_channel(2), gell_mann_basis(2)))
    assert not ok and value == pytest.approx(3)


def test_diag_condition_qubit_only():
    with pytest.raises(UnsupportedDimension):
        ebt_diag_necessary(transfer_matrix(identity_channel(3), gell_mann_basis(3)))
