import numpy as np
import pytest

from ebtkit.decomposition import SeparableDecomposition
from ebtkit.states import random_density, random_pure


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_states(d, n, seed=0):
    rng = np.random.default_rng(seed)
    return [random_density(d, seed=rng).mat for _ in range(n)]


def random_hermitian(d, rng):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (g + g.conj().T) / 2


def random_kraus(d_in, d_out, k, seed):
    """Random CPT map with k Kraus operators from a Haar-like isometry."""
    from ebtkit.channels import KrausChannel
    from ebtkit.states import ginibre

    q, _ = np.linalg.qr(ginibre(d_out * k, d_in, seed))
    return KrausChannel(tuple(q.reshape(k, d_out, d_in)))


def random_holevo(d, n, seed, rank=None):
    from ebtkit.channels import HolevoChannel
    from ebtkit.states import random_povm

    rng = np.random.default_rng(seed)
    povm = random_povm(d, n, seed=rng)
    states = [random_density(d, rank, seed=rng).mat for _ in range(n)]
    return HolevoChannel(tuple(states), povm.elements)


def random_extreme_cq(d, seed):
    from ebtkit.channels import cq_channel
    from ebtkit.states import random_pure, random_unitary

    rng = np.random.default_rng(seed)
    basis = random_unitary(d, seed=rng).T
    return cq_channel([random_pure(d, seed=rng).projector() for _ in range(d)], basis)


def random_qc(d, n, seed):
    from ebtkit.channels import qc_channel
    from ebtkit.states import random_povm

    return qc_channel(random_povm(d, n, seed=seed))


def grouped_decomposition(d, k, rng):
    """Rank-d separable state from k > d products arranged in groups sharing a right vector.

    Group g has n_g left vectors spanning a random r_g-dimensional subspace with
    sum_g r_g = d, so the state and its left marginal both have rank d.
    """
    n_groups = rng.integers(1, d + 1)
    ranks = np.ones(n_groups, dtype=int)
    for _ in range(d - n_groups):
        ranks[rng.integers(n_groups)] += 1
    counts = ranks.copy()
    for _ in range(k - d):
        counts[rng.integers(n_groups)] += 1
    terms = []
    for r, n in zip(ranks, counts):
        sub = np.linalg.qr(rng.normal(size=(d, r)) + 1j * rng.normal(size=(d, r)))[0]
        b = random_pure(d, seed=rng).vec
        for _ in range(n):
            c = rng.normal(size=r) + 1j * rng.normal(size=r)
            terms.append((rng.uniform(0.2, 1.0), sub @ c, b))
    return SeparableDecomposition.from_terms((d, d), terms, normalize=True)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for name, _ in mod.CRITERIA:
        if name in results:
            ok, detail = results[name]
            terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
