import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ebtkit.basis import bloch_vector, gell_mann_basis
from ebtkit.errors import DimensionMismatch, IncompleteSum, InvalidState, NotPsd, ShapeMismatch
from ebtkit.extremality import tetrahedron_vectors, trine_block_channel
from ebtkit.linalg import numerical_rank, partial_trace, proj, trace_distance
from ebtkit.states import (
    DensityMatrix,
    PureState,
    maximally_entangled,
    random_density,
    random_povm,
    validate_povm,
)


def test_maximally_entangled_components():
    assert np.allclose(maximally_entangled(2).vec, np.array([1, 0, 0, 1]) / np.sqrt(2))
    expected = np.zeros(9)
    expected[[0, 4, 8]] = 1 / np.sqrt(3)
    assert np.allclose(maximally_entangled(3).vec, expected)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_maximally_entangled_marginal(d):
    rho = maximally_entangled(d).projector()
    assert np.allclose(partial_trace(rho, (d, d)), np.eye(d) / d)


def test_maximally_entangled_rejects_d1():
    with pytest.raises(DimensionMismatch):
        maximally_entangled(1)


def test_density_matrix_validation():
    DensityMatrix(np.eye(2) / 2)
    with pytest.raises(InvalidState):
        DensityMatrix(np.eye(2))
    with pytest.raises(InvalidState):
        DensityMatrix(np.diag([1.1, -0.1]))
    with pytest.raises(InvalidState):
        DensityMatrix(np.array([[0.5, 1], [0, 0.5]]))
    with pytest.raises(ShapeMismatch):
        DensityMatrix(np.ones((2, 3)) / 2)


def test_pure_state_norm():
    PureState([1, 0])
    with pytest.raises(InvalidState):
        PureState([1, 1])
    assert np.allclose(PureState.normalized([1, 1]).vec, np.ones(2) / np.sqrt(2))


def test_validate_povm_examples():
    validate_povm([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
    validate_povm([0.75 * proj(v) for v in tetrahedron_vectors()])
    validate_povm(trine_block_channel().effects)


def test_validate_povm_errors():
    with pytest.raises(IncompleteSum) as exc:
        validate_povm([np.diag([1.0, 0.0])])
    assert exc.value.residual == pytest.approx(1.0)
    with pytest.raises(NotPsd) as exc:
        validate_povm([np.diag([1.0, 1.2]), np.diag([0.0, -0.2])])
    assert exc.value.index == 1
    with pytest.raises(ShapeMismatch):
        validate_povm([np.eye(2), np.eye(3)])
    with pytest.raises(NotPsd):
        validate_povm([np.eye(2), np.zeros((2, 2))])


@pytest.mark.parametrize("eps", [0.0, 5e-11, -5e-11, 1e-9, -1e-9])
def test_validate_povm_completeness_boundary(eps):
    elements = [np.diag([1.0, 0.0]), np.diag([0.0, 1.0 + eps])]
    if abs(eps) <= 1e-10:
        validate_povm(elements)
    else:
        with pytest.raises(IncompleteSum):
            validate_povm(elements)


@pytest.mark.parametrize("eps", [0.0, 5e-11, 1e-9])
def test_validate_povm_negativity_boundary(eps):
    # exact completeness, second element has eigenvalue -eps
    elements = [np.diag([0.5, 1.0 + eps]), np.diag([0.5, -eps])]
    if eps <= 1e-10:
        validate_povm(elements)
    else:
        with pytest.raises(NotPsd):
            validate_povm(elements)


def test_random_density_deterministic():
    assert np.array_equal(random_density(3, 3, seed=7).mat, random_density(3, 3, seed=7).mat)


@pytest.mark.parametrize("d,r", [(2, 1), (3, 2), (4, 4), (5, 3)])
def test_random_density_rank(d, r):
    assert numerical_rank(random_density(d, r, seed=d * 10 + r).mat, 1e-10) == r


def test_random_density_rank_errors():
    with pytest.raises(ValueError):
        random_density(3, 4)
    with pytest.raises(ValueError):
        random_povm(2, 0)


@pytest.mark.parametrize("d,n", [(2, 5), (3, 2), (4, 7)])
def test_random_povm_valid(d, n):
    povm = random_povm(d, n, seed=3)
    assert len(povm) == n
    validate_povm(povm.elements)


def test_random_density_mean_is_maximally_mixed():
    d = 3
    mean = sum(random_density(d, d, seed=s).mat for s in range(1000)) / 1000
    assert trace_distance(mean, np.eye(d) / d) < 0.1


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5), st.integers(0, 2**32 - 1))
def test_purity_equals_bloch_norm(d, seed):
    rho = random_density(d, seed=seed)
    w = bloch_vector(rho, gell_mann_basis(d))
    purity = np.trace(rho.mat @ rho.mat).real
    assert np.sum(w**2) == pytest.approx(purity, abs=1e-12)
    assert purity <= 1 + 1e-12
