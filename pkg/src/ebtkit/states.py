"""Validated density matrices, pure states and POVMs, plus seeded random generators."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, IncompleteSum, InvalidState, NotPsd, ShapeMismatch
from .linalg import as_matrix, is_hermitian, min_eigenvalue

TRACE_TOL = 1e-10
EIG_TOL = 1e-10
NORM_TOL = 1e-12
POVM_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    mat: np.ndarray

    def __post_init__(self):
        m = as_matrix(self.mat)
        if m.shape[0] != m.shape[1]:
            raise ShapeMismatch(f"density matrix must be square, got {m.shape}")
        if not is_hermitian(m):
            raise InvalidState("density matrix is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidState(f"density matrix has trace {tr!r}")
        lam = min_eigenvalue(m)
        if lam < -EIG_TOL:
            raise InvalidState(f"density matrix has negative eigenvalue {lam:.3e}")
        m = 0.5 * (m + m.conj().T)
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.mat, dtype=dtype)

    @classmethod
    def from_pure(cls, vec) -> DensityMatrix:
        v = PureState(vec).vec
        return cls(np.outer(v, v.conj()))

    @classmethod
    def normalized(cls, m) -> DensityMatrix:
        """Rescale a nonzero PSD matrix to unit trace."""
        m = as_matrix(m)
        return cls(m / np.trace(m).real)


@dataclass(frozen=True, eq=False)
class PureState:
    vec: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vec, dtype=complex).reshape(-1)
        if v.size < 1:
            raise ShapeMismatch("empty state vector")
        n = np.linalg.norm(v)
        if abs(n - 1.0) > NORM_TOL:
            raise InvalidState(f"state vector has norm {n!r}")
        v.setflags(write=False)
        object.__setattr__(self, "vec", v)

    @property
    def dim(self) -> int:
        return self.vec.size

    def projector(self) -> np.ndarray:
        return np.outer(self.vec, self.vec.conj())

    @classmethod
    def normalized(cls, vec) -> PureState:
        v = np.asarray(vec, dtype=complex).reshape(-1)
        return cls(v / np.linalg.norm(v))


@dataclass(frozen=True, eq=False)
class Povm:
    elements: tuple[np.ndarray, ...]

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)


def _check_effects(elements, zero_ok: bool = False) -> list[np.ndarray]:
    mats = [as_matrix(e) for e in elements]
    if not mats:
        raise ShapeMismatch("at least one element is required")
    d = mats[0].shape[0]
    for k, m in enumerate(mats):
        if m.shape != (d, d):
            raise ShapeMismatch(f"element {k} has shape {m.shape}, expected {(d, d)}")
        if not is_hermitian(m):
            raise NotPsd(f"element {k} is not Hermitian", index=k)
        lam = min_eigenvalue(m)
        if lam < -POVM_TOL:
            raise NotPsd(f"element {k} has negative eigenvalue {lam:.3e}", index=k, min_eigenvalue=lam)
        if not zero_ok and np.linalg.norm(m) <= POVM_TOL:
            raise NotPsd(f"element {k} is zero", index=k, min_eigenvalue=0.0)
    return mats


def validate_povm(elements) -> Povm:
    mats = _check_effects(elements)
    d = mats[0].shape[0]
    residual = float(np.linalg.norm(sum(mats) - np.eye(d)))
    if residual > POVM_TOL:
        raise IncompleteSum(f"elements sum to identity only within {residual:.3e}", residual)
    frozen = []
    for m in mats:
        m = 0.5 * (m + m.conj().T)
        m.setflags(write=False)
        frozen.append(m)
    return Povm(tuple(frozen))


def maximally_entangled(d: int) -> PureState:
    if d < 2:
        raise DimensionMismatch(f"maximally entangled state needs d >= 2, got {d}")
    v = np.zeros(d * d, dtype=complex)
    v[np.arange(d) * (d + 1)] = 1.0 / np.sqrt(d)
    return PureState(v)


def computational_basis(d: int) -> list[PureState]:
    return [PureState(row) for row in np.eye(d, dtype=complex)]


# --- random generators --------------------------------------------------------

def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def ginibre(rows: int, cols: int, seed=None) -> np.ndarray:
    rng = _rng(seed)
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def random_unitary(d: int, seed=None) -> np.ndarray:
    """Haar-random unitary via QR of a Ginibre matrix with phase correction."""
    q, r = np.linalg.qr(ginibre(d, d, seed))
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_pure(d: int, seed=None) -> PureState:
    v = ginibre(d, 1, seed)[:, 0]
    return PureState(v / np.linalg.norm(v))


def random_density(d: int, rank: int | None = None, seed=None) -> DensityMatrix:
    rank = d if rank is None else rank
    if not 1 <= rank <= d:
        raise ValueError(f"rank must lie in [1, {d}], got {rank}")
    g = ginibre(d, rank, seed)
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real)


def random_povm(d: int, n_elements: int, seed=None) -> Povm:
    if n_elements < 1:
        raise ValueError("a POVM needs at least one element")
    rng = _rng(seed)
    raw = []
    for _ in range(n_elements):
        g = ginibre(d, d, rng)
        raw.append(g @ g.conj().T)
    s = sum(raw)
    vals, vecs = np.linalg.eigh(s)
    s_inv_half = (vecs / np.sqrt(vals)) @ vecs.conj().T
    return validate_povm([s_inv_half @ f @ s_inv_half for f in raw])
