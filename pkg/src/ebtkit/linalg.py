"""Dense complex linear algebra on numpy arrays.

Bipartite matrices use the composite index ``i = i_a * dim_b + i_b``, so the
first factor is the slow index, matching ``np.kron``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotHermitian, ShapeMismatch

PSD_TOL = 1e-10
_PHASE_EPS = 1e-12


@dataclass(frozen=True)
class BipartiteDims:
    dim_a: int
    dim_b: int

    def __post_init__(self):
        if self.dim_a < 1 or self.dim_b < 1:
            raise DimensionMismatch(f"factor dimensions must be positive, got {self.dim_a}, {self.dim_b}")

    @property
    def total(self) -> int:
        return self.dim_a * self.dim_b


def as_matrix(m) -> np.ndarray:
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeMismatch(f"expected a non-empty 2-d matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return arr


def herm_tol(m: np.ndarray) -> float:
    return 1e-10 * (1.0 + np.linalg.norm(m))


def is_hermitian(m, tol: float | None = None) -> bool:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        return False
    if tol is None:
        tol = herm_tol(m)
    return bool(np.linalg.norm(m - m.conj().T) <= tol)


def _require_hermitian(m: np.ndarray) -> None:
    if m.shape[0] != m.shape[1]:
        raise ShapeMismatch(f"expected a square matrix, got shape {m.shape}")
    err = np.linalg.norm(m - m.conj().T)
    if err > herm_tol(m):
        raise NotHermitian(f"matrix deviates from Hermitian by {err:.3e}")


def _selector(which) -> int:
    if which in (0, "a", "A", "first"):
        return 0
    if which in (1, "b", "B", "second"):
        return 1
    raise ValueError(f"factor selector must be 0/'first' or 1/'second', got {which!r}")


def _as_dims(dims) -> BipartiteDims:
    if isinstance(dims, BipartiteDims):
        return dims
    dim_a, dim_b = dims
    return BipartiteDims(int(dim_a), int(dim_b))


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def _bipartite_tensor(m, dims) -> tuple[np.ndarray, BipartiteDims]:
    m = as_matrix(m)
    dims = _as_dims(dims)
    if m.shape != (dims.total, dims.total):
        raise DimensionMismatch(f"matrix of shape {m.shape} does not match dims ({dims.dim_a}, {dims.dim_b})")
    return m.reshape(dims.dim_a, dims.dim_b, dims.dim_a, dims.dim_b), dims


def partial_trace(m, dims, which=1) -> np.ndarray:
    """Trace out one factor of a bipartite matrix.

    ``which=1`` (the default) traces over the second factor and returns a
    ``dim_a x dim_a`` matrix; ``which=0`` traces over the first.
    """
    t, _ = _bipartite_tensor(m, dims)
    if _selector(which) == 1:
        return np.einsum("ijkj->ik", t)
    return np.einsum("ijil->jl", t)


def partial_transpose(m, dims, which=1) -> np.ndarray:
    t, d = _bipartite_tensor(m, dims)
    if _selector(which) == 1:
        t = t.transpose(0, 3, 2, 1)
    else:
        t = t.transpose(2, 1, 0, 3)
    return t.reshape(d.total, d.total)


def _fix_phases(vecs: np.ndarray) -> np.ndarray:
    out = vecs.copy()
    for col in range(out.shape[1]):
        v = out[:, col]
        idx = np.flatnonzero(np.abs(v) > _PHASE_EPS)
        if idx.size:
            ph = v[idx[0]] / abs(v[idx[0]])
            out[:, col] = v / ph
    return out


def hermitian_eig(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.

    Each eigenvector's first non-negligible component is made real positive.
    Within a degenerate cluster the choice of vectors is arbitrary.
    """
    m = as_matrix(m)
    _require_hermitian(m)
    m = 0.5 * (m + m.conj().T)
    vals, vecs = np.linalg.eigh(m)
    return vals, _fix_phases(vecs)


def default_rank_tol(m: np.ndarray, sigma_max: float) -> float:
    return max(m.shape) * np.finfo(float).eps * sigma_max


def numerical_rank(m, tol: float | None = None) -> int:
    m = as_matrix(m)
    s = np.linalg.svd(m, compute_uv=False)
    if tol is None:
        tol = default_rank_tol(m, s[0] if s.size else 0.0)
    return int(np.count_nonzero(s > tol))


def min_eigenvalue(m) -> float:
    m = as_matrix(m)
    _require_hermitian(m)
    return float(np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0])


def is_psd(m, tol: float = PSD_TOL) -> bool:
    return min_eigenvalue(m) >= -tol


def hs_inner(a, b) -> complex:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise ShapeMismatch(f"shapes differ: {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def psd_sqrt(m) -> np.ndarray:
    vals, vecs = np.linalg.eigh(0.5 * (as_matrix(m) + as_matrix(m).conj().T))
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def proj(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    return np.outer(v, v.conj())


def trace_distance(a, b) -> float:
    diff = as_matrix(a) - as_matrix(b)
    diff = 0.5 * (diff + diff.conj().T)
    return float(0.5 * np.abs(np.linalg.eigvalsh(diff)).sum())
