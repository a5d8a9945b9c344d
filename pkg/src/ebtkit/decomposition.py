"""Convex decompositions of bipartite states into pure product states."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidState
from .linalg import BipartiteDims, _as_dims, as_matrix

WEIGHT_SUM_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SeparableDecomposition:
    """``sum_n weights[n] * |left[n]><left[n]| (x) |right[n]><right[n]|``.

    ``left`` has shape ``(n_terms, dim_a)`` and ``right`` has shape
    ``(n_terms, dim_b)``; rows are unit vectors.
    """

    dims: BipartiteDims
    weights: np.ndarray
    left: np.ndarray
    right: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dims", _as_dims(self.dims))
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        left = np.atleast_2d(np.asarray(self.left, dtype=complex))
        right = np.atleast_2d(np.asarray(self.right, dtype=complex))
        if not (len(w) == len(left) == len(right)) or len(w) == 0:
            raise DimensionMismatch("weights, left and right must have the same positive length")
        if left.shape[1] != self.dims.dim_a or right.shape[1] != self.dims.dim_b:
            raise DimensionMismatch("vector lengths do not match dims")
        if np.any(w <= 0):
            raise InvalidState("weights must be positive")
        if abs(w.sum() - 1.0) > WEIGHT_SUM_TOL:
            raise InvalidState(f"weights sum to {w.sum()!r}, not 1")
        for name, vecs in (("left", left), ("right", right)):
            norms = np.linalg.norm(vecs, axis=1)
            if np.max(np.abs(norms - 1.0)) > 1e-10:
                raise InvalidState(f"{name} vectors are not normalized")
        for arr in (w, left, right):
            arr.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)

    def __len__(self) -> int:
        return len(self.weights)

    def product_vectors(self) -> np.ndarray:
        """Columns ``left[n] (x) right[n]``, shape ``(dim_a*dim_b, n_terms)``."""
        return np.einsum("na,nb->abn", self.left, self.right).reshape(self.dims.total, len(self))

    def state(self) -> np.ndarray:
        vecs = self.product_vectors()
        return (vecs * self.weights) @ vecs.conj().T

    def residual(self, target) -> float:
        return float(np.linalg.norm(self.state() - as_matrix(target)))

    @classmethod
    def from_terms(cls, dims, terms, normalize: bool = False) -> SeparableDecomposition:
        """Build from ``(weight, left, right)`` triples.

        Unnormalized vectors have their squared norms folded into the weight.
        With ``normalize=True`` the weights are also rescaled to sum to one.
        """
        dims = dims if isinstance(dims, BipartiteDims) else BipartiteDims(*dims)
        ws, ls, rs = [], [], []
        for w, a, b in terms:
            a = np.asarray(a, dtype=complex).reshape(-1)
            b = np.asarray(b, dtype=complex).reshape(-1)
            na, nb = np.linalg.norm(a), np.linalg.norm(b)
            ws.append(float(w) * na**2 * nb**2)
            ls.append(a / na)
            rs.append(b / nb)
        ws = np.array(ws)
        if normalize:
            ws = ws / ws.sum()
        return cls(dims, ws, np.array(ls), np.array(rs))
