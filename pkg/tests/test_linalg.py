import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ebtkit.errors import DimensionMismatch, NotHermitian
from ebtkit.linalg import (
    BipartiteDims,
    hermitian_eig,
    hs_inner,
    is_psd,
    kron,
    numerical_rank,
    partial_trace,
    partial_transpose,
)
from ebtkit.states import maximally_entangled, random_unitary

from conftest import random_hermitian


def bell(d):
    return maximally_entangled(d).projector()


def rand_c(shape, rng):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def test_kron_identity_and_basis_projectors():
    assert np.allclose(kron(np.eye(2), np.eye(2)), np.eye(4))
    p0 = np.diag([1.0, 0.0])
    p1 = np.diag([0.0, 1.0])
    out = kron(p0, p1)
    expected = np.zeros((4, 4))
    expected[1, 1] = 1.0
    assert np.allclose(out, expected)


def test_kron_index_convention(rng):
    a, b = rand_c((2, 3), rng), rand_c((3, 2), rng)
    out = kron(a, b)
    for i in range(2):
        for j in range(3):
            for k in range(3):
                for l in range(2):
                    assert out[i * 3 + k, j * 2 + l] == pytest.approx(a[i, j] * b[k, l])


def test_kron_trace_and_associativity(rng):
    a, b, c = rand_c((2, 2), rng), rand_c((3, 3), rng), rand_c((2, 2), rng)
    assert np.trace(kron(a, b)) == pytest.approx(np.trace(a) * np.trace(b))
    assert np.max(np.abs(kron(kron(a, b), c) - kron(a, kron(b, c)))) < 1e-12


def test_partial_trace_examples(rng):
    assert np.allclose(partial_trace(bell(3), BipartiteDims(3, 3)), np.eye(3) / 3)
    assert np.allclose(partial_trace(np.eye(4), (2, 2), which=0), 2 * np.eye(2))
    assert np.allclose(partial_trace(np.eye(4), (2, 2), which=1), 2 * np.eye(2))
    a, b = rand_c((2, 2), rng), rand_c((3, 3), rng)
    m = kron(a, b)
    assert np.allclose(partial_trace(m, (2, 3), which=0), b * np.trace(a))
    assert np.allclose(partial_trace(m, (2, 3), which=1), a * np.trace(b))


def test_partial_trace_preserves_trace(rng):
    m = rand_c((6, 6), rng)
    for which in (0, 1):
        assert abs(np.trace(partial_trace(m, (2, 3), which)) - np.trace(m)) < 1e-12


def test_partial_trace_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        partial_trace(np.eye(5), (2, 2))


def test_partial_transpose_examples(rng):
    pt = partial_transpose(bell(2), (2, 2))
    assert np.allclose(np.linalg.eigvalsh(pt), [-0.5, 0.5, 0.5, 0.5])
    a, b = rand_c((2, 2), rng), rand_c((3, 3), rng)
    assert np.allclose(partial_transpose(kron(a, b), (2, 3)), kron(a, b.T))
    assert np.allclose(partial_transpose(kron(a, b), (2, 3), which=0), kron(a.T, b))
    m = rand_c((6, 6), rng)
    assert np.allclose(partial_transpose(partial_transpose(m, (2, 3)), (2, 3)), m)


def test_partial_transpose_spectrum_of_products(rng):
    a = random_hermitian(2, rng)
    b = random_hermitian(3, rng)
    lhs = np.linalg.eigvalsh(partial_transpose(kron(a, b), (2, 3)))
    rhs = np.linalg.eigvalsh(kron(a, b.T))
    assert np.allclose(lhs, rhs)


def test_hermitian_eig_examples():
    vals, _ = hermitian_eig(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(vals, [1, 2, 3])
    vals, _ = hermitian_eig(bell(2))
    assert np.allclose(vals, [0, 0, 0, 1])
    vals, vecs = hermitian_eig(np.array([[0, 1], [1, 0]]))
    assert np.allclose(vals, [-1, 1])
    assert abs(abs(np.vdot(vecs[:, 0], np.array([1, -1]) / np.sqrt(2))) - 1) < 1e-12
    assert abs(abs(np.vdot(vecs[:, 1], np.array([1, 1]) / np.sqrt(2))) - 1) < 1e-12


def test_hermitian_eig_phase_convention(rng):
    _, vecs = hermitian_eig(random_hermitian(5, rng))
    for v in vecs.T:
        first = v[np.flatnonzero(np.abs(v) > 1e-12)[0]]
        assert abs(first.imag) < 1e-14 and first.real > 0


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=1, max_value=16), st.integers(min_value=0, max_value=2**32 - 1))
def test_hermitian_eig_reconstruction(d, seed):
    m = random_hermitian(d, np.random.default_rng(seed))
    vals, vecs = hermitian_eig(m)
    assert np.all(np.diff(vals) >= 0)
    assert np.allclose(vecs.conj().T @ vecs, np.eye(d))
    assert np.linalg.norm(vecs @ np.diag(vals) @ vecs.conj().T - m) <= 1e-10 * np.linalg.norm(m)


def test_hermitian_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        hermitian_eig(np.array([[0, 1], [0, 0]]))


def test_numerical_rank_examples():
    from ebtkit.channels import choi_of
    from ebtkit.extremality import tetrahedron_channel

    assert numerical_rank(np.eye(4)) == 4
    assert numerical_rank(bell(3)) == 1
    assert numerical_rank(choi_of(tetrahedron_channel()).mat) == 4


@pytest.mark.parametrize("rank", [1, 2, 4])
def test_numerical_rank_unitary_invariance(rank, rng):
    g = rand_c((5, rank), rng)
    m = g @ g.conj().T
    u = random_unitary(5, seed=rng)
    assert numerical_rank(m) == rank
    assert numerical_rank(u @ m @ u.conj().T) == rank


def test_is_psd():
    assert is_psd(np.eye(3))
    assert not is_psd(np.diag([1.0, -0.1]), tol=1e-10)
    from ebtkit.channels import choi_of, depolarizing_channel

    c = choi_of(depolarizing_channel(2, 0.5)).mat
    assert not is_psd(partial_transpose(c, (2, 2)))


def test_hs_inner(rng):
    assert hs_inner(np.eye(2), np.eye(2)) == pytest.approx(2)
    a, b = rand_c((3, 3), rng), rand_c((3, 3), rng)
    assert hs_inner(a, b) == pytest.approx(np.conj(hs_inner(b, a)))
    assert hs_inner(a, b) == pytest.approx(np.trace(a.conj().T @ b))


def test_bipartite_dims_validation():
    assert BipartiteDims(2, 3).total == 6
    with pytest.raises(ValueError):
        BipartiteDims(0, 3)
